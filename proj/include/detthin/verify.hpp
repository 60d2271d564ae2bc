#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "detthin/circle.hpp"
#include "detthin/counter_hash.hpp"
#include "detthin/fraction.hpp"
#include "detthin/poisson_math.hpp"
#include "detthin/thinning.hpp"

namespace detthin {

enum class Variant { unit, box, circle, tiled };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct TrialConfig {
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  IntensityPair intensities{2.0, 1.0, 1.0};
  Variant variant = Variant::unit;
  double significance = 0.01;
  // Box variant: [0,1]^(d-1) x [0, volume]. Tiled variant: [0, volume]^d.
  std::size_t dimension = 1;
  // 0 means THIN_THREADS or the hardware concurrency.
  unsigned threads = 0;

  void validate() const;  // PreconditionError on bad plumbing values
};

TrialConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const TrialConfig& c);

struct TestResult {
  std::string name;
  bool mandatory = true;
  bool exact = false;       // threshold tests report an error and tolerance, no p-value
  double statistic = 0.0;   // test statistic, or the error
  double tolerance = 0.0;   // threshold tests pass when statistic <= tolerance
  double p_value = 1.0;
  std::size_t samples = 0;
  bool passed = true;
};

struct TestReport {
  TrialConfig config;
  std::vector<TestResult> tests;
  bool passed = true;

  nlohmann::ordered_json to_json() const;
  const TestResult* find(const std::string& name) const;
};

/// Poisson(mean) count from lane `lane` of the stream: inversion for
/// mean <= 30, Hoermann's PTRS rejection above.
std::uint64_t sample_poisson_count(double mean, const CounterStream& rng, std::uint64_t lane = 0);

/// Poisson process of intensity lambda on a space of volume vol, realized
/// as N ~ Poisson(lambda * vol) i.i.d. uniform 128-bit points.
PointSet sample_process(double lambda, double volume, const CounterStream& rng);
CirclePointSet sample_circle_process(double lambda, const CounterStream& rng);
EuclideanPointSet sample_box_process(double lambda, const BoxSpec& box, const CounterStream& rng);

/// Stream of trial `trial` under `seed`.
inline CounterStream trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return CounterStream(seed, trial);
}

/// Runs the Monte Carlo suite. Throws FeasibilityError for an infeasible
/// pair and DomainError when lambda <= mu, before sampling anything.
TestReport run_suite(const TrialConfig& config);

unsigned resolve_threads(unsigned requested);

}  // namespace detthin
