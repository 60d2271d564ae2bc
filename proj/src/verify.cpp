#include "detthin/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <thread>

#include "detthin/deletion.hpp"
#include "detthin/errors.hpp"
#include "detthin/stats.hpp"

namespace detthin {
namespace {

constexpr std::size_t kMaxOrderCount = 3;
constexpr std::size_t kMinKsSamples = 20;
constexpr std::size_t kDeterminismStride = 101;
constexpr std::size_t kEquivarianceTrials = 500;

struct TrialRecord {
  std::size_t count = 0;  // survivors inside the measured region
  std::array<double, kMaxOrderCount> coords{};
  bool subset_ok = true;
  bool degenerate = false;
  bool deterministic = true;
  bool equivariant = true;
};

// Everything a trial needs that does not depend on the trial index.
struct Harness {
  TrialConfig config;
  BoxSpec box;
  std::unique_ptr<PoissonThinning> thinning;  // unit, box, circle
  double measured_volume = 0.0;
  double measured_extent = 0.0;  // last-axis extent of the measured region (box/tiled)
};

BoxSpec variant_box(const TrialConfig& c) {
  std::vector<double> lo(c.dimension, 0.0), hi(c.dimension, 1.0);
  hi.back() = c.intensities.volume;
  return BoxSpec(lo, hi);
}

// Output of one thinning pass, reduced to comparable keys plus the
// coordinates used by the uniformity tests.
struct TrialOutput {
  std::vector<u128> keys;
  std::vector<double> coords;  // measured-region coordinate in [0,1)
  bool subset_ok = true;
  bool degenerate = false;
};

TrialOutput thin_trial(const Harness& h, const CounterStream& rng) {
  const TrialConfig& c = h.config;
  TrialOutput out;
  switch (c.variant) {
    case Variant::unit: {
      const PointSet in = sample_process(c.intensities.lambda, c.intensities.volume, rng);
      const PointSet res = h.thinning->apply(in);
      out.subset_ok = res.is_subset_of(in);
      for (const UnitPoint& p : res) {
        out.keys.push_back(p.bits);
        out.coords.push_back(p.to_double());
      }
      break;
    }
    case Variant::circle: {
      const CirclePointSet in = sample_circle_process(c.intensities.lambda, rng);
      const auto res = h.thinning->apply(in);
      out.subset_ok = res.points.is_subset_of(in);
      out.degenerate = res.degenerate;
      for (const CirclePoint& p : res.points) {
        out.keys.push_back(p.turns);
        out.coords.push_back(UnitPoint{p.turns}.to_double());
      }
      break;
    }
    case Variant::box:
    case Variant::tiled: {
      const EuclideanPointSet in = sample_box_process(c.intensities.lambda, h.box, rng);
      EuclideanPointSet res;
      if (c.variant == Variant::box) {
        res = thin_box(in, h.box, c.intensities.lambda, c.intensities.mu);
      } else {
        res = tile_thin(in, h.box, c.intensities.lambda, c.intensities.mu).points;
      }
      std::vector<BoxPoint> sorted_in = in.points;
      std::sort(sorted_in.begin(), sorted_in.end());
      const std::size_t last = c.dimension - 1;
      for (const BoxPoint& p : res.points) {
        if (!std::binary_search(sorted_in.begin(), sorted_in.end(), p)) out.subset_ok = false;
        const double x = h.box.coordinate(p[last], last);
        for (const UnitPoint& q : p) out.keys.push_back(q.bits);
        if (x < h.measured_extent) out.coords.push_back(x / h.measured_extent);
      }
      break;
    }
  }
  std::sort(out.coords.begin(), out.coords.end());
  return out;
}

bool equivariance_holds(const Harness& h, const CounterStream& rng) {
  const CirclePointSet in = sample_circle_process(h.config.intensities.lambda, rng);
  const u128 theta = rng.word128(7, 0);
  const auto direct = h.thinning->apply(in);
  const auto turned = h.thinning->apply(rotate(in, theta));
  return direct.degenerate == turned.degenerate &&
         rotate(direct.points, theta) == turned.points;
}

TrialRecord run_trial(const Harness& h, std::size_t trial) {
  const CounterStream rng = trial_stream(h.config.seed, trial);
  const TrialOutput out = thin_trial(h, rng);
  TrialRecord r;
  r.count = out.coords.size();
  std::copy_n(out.coords.begin(), std::min(out.coords.size(), kMaxOrderCount), r.coords.begin());
  r.subset_ok = out.subset_ok;
  r.degenerate = out.degenerate;
  if (trial % kDeterminismStride == 0) {
    const TrialOutput again = thin_trial(h, rng);
    r.deterministic = again.keys == out.keys && again.degenerate == out.degenerate;
  }
  if (h.config.variant == Variant::circle && trial < kEquivarianceTrials) {
    r.equivariant = equivariance_holds(h, rng);
  }
  return r;
}

TestResult statistical(std::string name, double statistic, double p, std::size_t samples,
                       double significance, bool mandatory = true) {
  TestResult t;
  t.name = std::move(name);
  t.statistic = statistic;
  t.p_value = p;
  t.samples = samples;
  t.mandatory = mandatory;
  t.passed = p > significance;
  return t;
}

TestResult exact(std::string name, double error, std::size_t samples, double tolerance = 0.0) {
  TestResult t;
  t.name = std::move(name);
  t.exact = true;
  t.statistic = error;
  t.p_value = 1.0;
  t.tolerance = tolerance;
  t.samples = samples;
  t.passed = error <= tolerance;
  return t;
}

// Deletion push oracle: the set of added points undone by the deletion has
// mass 1/n. Reports the largest |z| over 25 random configurations.
TestResult push_oracle(const TrialConfig& c) {
  constexpr std::size_t kSamples = 20000;
  double worst = 0.0;
  std::size_t sets = 0;
  for (std::uint32_t n = 2; n <= 6; ++n) {
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const CounterStream rng(c.seed ^ 0x707573685f6f7261ULL, n * 100 + rep);
      std::vector<UnitPoint> pts;
      for (std::uint32_t j = 0; j + 1 < n; ++j) pts.push_back(UnitPoint{rng.word128(9, j)});
      const MeasureEstimate m = r_set_measure(PointSet(pts), kSamples, rng.word(10, 0));
      const double q = 1.0 / n;
      const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(m.samples));
      worst = std::max(worst, std::abs(m.estimate - q) / se);
      ++sets;
    }
  }
  return exact("push_oracle_max_z", worst, sets, 3.0);
}

// Exact measure of the gas-station arc set for random configurations.
TestResult t_set_oracle(const TrialConfig& c) {
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint32_t n = 2; n <= 8; ++n) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      const CounterStream rng(c.seed ^ 0x747365745f6f7261ULL, n * 100 + rep);
      std::vector<CirclePoint> pts;
      for (std::uint32_t j = 0; j + 1 < n; ++j) pts.push_back(CirclePoint{rng.word128(9, j)});
      const ArcUnion t = t_set(CirclePointSet(pts));
      worst = std::max(worst, std::abs(t.measure() - 1.0 / n));
      ++checked;
    }
  }
  return exact("t_set_measure", worst, checked, 1e-12);
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::unit: return "unit";
    case Variant::box: return "box";
    case Variant::circle: return "circle";
    case Variant::tiled: return "tiled";
  }
  return "unit";
}

Variant parse_variant(const std::string& name) {
  if (name == "unit") return Variant::unit;
  if (name == "box") return Variant::box;
  if (name == "circle") return Variant::circle;
  if (name == "tiled") return Variant::tiled;
  throw PreconditionError("unknown variant: " + name);
}

void TrialConfig::validate() const {
  if (trials < 1) throw PreconditionError("trials must be at least 1");
  if (!(significance > 0.0 && significance < 1.0)) {
    throw PreconditionError("significance must lie in (0,1)");
  }
  if (dimension < 1 || dimension > 16) throw PreconditionError("dimension must be in 1..16");
  if (variant == Variant::circle && intensities.volume != 1.0) {
    throw PreconditionError("the circle has unit length; volume must be 1");
  }
  if ((variant == Variant::unit || variant == Variant::circle) && dimension != 1) {
    throw PreconditionError("unit and circle variants are one-dimensional");
  }
}

TrialConfig config_from_json(const nlohmann::json& j) {
  TrialConfig c;
  try {
    c.intensities.lambda = j.at("lambda").get<double>();
    c.intensities.mu = j.at("mu").get<double>();
    c.intensities.volume = j.value("volume", 1.0);
    c.variant = parse_variant(j.value("variant", std::string("unit")));
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.significance = j.value("significance", c.significance);
    c.dimension = j.value("dimension", c.dimension);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("bad verify config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json config_to_json(const TrialConfig& c) {
  nlohmann::ordered_json j;
  j["lambda"] = c.intensities.lambda;
  j["mu"] = c.intensities.mu;
  j["volume"] = c.intensities.volume;
  j["variant"] = to_string(c.variant);
  j["dimension"] = c.dimension;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["significance"] = c.significance;
  return j;
}

nlohmann::ordered_json TestReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(config);
  j["tests"] = nlohmann::ordered_json::array();
  for (const TestResult& t : tests) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["kind"] = t.exact ? "exact" : "statistical";
    e["mandatory"] = t.mandatory;
    if (t.exact) {
      e["error"] = t.statistic;
      e["tolerance"] = t.tolerance;
    } else {
      e["statistic"] = t.statistic;
      e["p_value"] = t.p_value;
    }
    e["samples"] = t.samples;
    e["passed"] = t.passed;
    j["tests"].push_back(std::move(e));
  }
  j["passed"] = passed;
  return j;
}

const TestResult* TestReport::find(const std::string& name) const {
  for (const TestResult& t : tests) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::uint64_t sample_poisson_count(double mean, const CounterStream& rng, std::uint64_t lane) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite");
  if (mean == 0.0) return 0;
  if (mean <= 30.0) {
    const double u = rng.uniform(lane, 0);
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // PTRS (transformed rejection with squeeze).
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (std::uint64_t c = 0;; c += 2) {
    const double u = rng.uniform(lane, c) - 0.5;
    const double v = rng.uniform(lane, c + 1);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * log_mean - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

PointSet sample_process(double lambda, double volume, const CounterStream& rng) {
  const std::uint64_t n = sample_poisson_count(lambda * volume, rng);
  std::vector<UnitPoint> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) pts.push_back(UnitPoint{rng.word128(1, i)});
  return PointSet(std::move(pts));
}

CirclePointSet sample_circle_process(double lambda, const CounterStream& rng) {
  const std::uint64_t n = sample_poisson_count(lambda, rng);
  std::vector<CirclePoint> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) pts.push_back(CirclePoint{rng.word128(1, i)});
  return CirclePointSet(std::move(pts));
}

EuclideanPointSet sample_box_process(double lambda, const BoxSpec& box, const CounterStream& rng) {
  const std::uint64_t n = sample_poisson_count(lambda * box.volume(), rng);
  EuclideanPointSet out;
  out.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    BoxPoint p(box.dimension());
    for (std::size_t a = 0; a < box.dimension(); ++a) {
      p[a] = UnitPoint{rng.word128(1 + a, i)};
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THIN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TestReport run_suite(const TrialConfig& config) {
  config.validate();
  config.intensities.validate_for_thinning();

  Harness h;
  h.config = config;
  const double lambda = config.intensities.lambda;
  const double mu = config.intensities.mu;
  switch (config.variant) {
    case Variant::unit:
    case Variant::circle:
      h.thinning = std::make_unique<PoissonThinning>(config.intensities.lambda_eff(),
                                                     config.intensities.mu_eff());
      h.measured_volume = config.intensities.volume;
      break;
    case Variant::box:
      h.box = variant_box(config);
      h.thinning = std::make_unique<PoissonThinning>(lambda * h.box.volume(), mu * h.box.volume());
      h.measured_volume = h.box.volume();
      h.measured_extent = h.box.extent(config.dimension - 1);
      break;
    case Variant::tiled: {
      h.box = variant_box(config);
      // Distributional tests use the union of full cubes only.
      const double side = std::pow(1.0 / (lambda - mu), 1.0 / static_cast<double>(config.dimension));
      h.measured_volume = 1.0;
      for (std::size_t a = 0; a < config.dimension; ++a) {
        const double full = std::floor(h.box.extent(a) / side + 1e-12) * side;
        if (a + 1 < config.dimension && full < 1.0 - 1e-12) {
          throw PreconditionError("tiled variant needs unit cross-section axes to hold a full cube");
        }
        if (a + 1 == config.dimension) {
          if (full <= 0.0) throw PreconditionError("tiled region holds no full cube");
          h.measured_extent = full;
        }
        h.measured_volume *= a + 1 == config.dimension ? full : 1.0;
      }
      break;
    }
  }

  std::vector<TrialRecord> records(config.trials);
  const unsigned threads = std::min<std::size_t>(resolve_threads(config.threads), config.trials);
  if (threads <= 1) {
    for (std::size_t i = 0; i < config.trials; ++i) records[i] = run_trial(h, i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < config.trials; i += threads) records[i] = run_trial(h, i);
      });
    }
    for (auto& th : pool) th.join();
  }

  TestReport report;
  report.config = config;
  const double target = mu * h.measured_volume;

  std::size_t max_count = 0;
  for (const TrialRecord& r : records) max_count = std::max(max_count, r.count);
  std::vector<std::size_t> hist(max_count + 1, 0);
  for (const TrialRecord& r : records) ++hist[r.count];
  std::vector<double> expected(hist.size());
  for (std::size_t j = 0; j < hist.size(); ++j) expected[j] = poisson_pmf(target, j);
  const ChiSquareResult counts = chi_square_gof(hist, expected);
  report.tests.push_back(statistical("count_chi_square", counts.statistic, counts.p_value,
                                     config.trials, config.significance));

  for (std::size_t m = 1; m <= kMaxOrderCount; ++m) {
    for (std::size_t i = 1; i <= m; ++i) {
      std::vector<double> xs;
      for (const TrialRecord& r : records) {
        if (r.count == m) xs.push_back(r.coords[i - 1]);
      }
      const double a = static_cast<double>(i), b = static_cast<double>(m + 1 - i);
      const KsResult ks = ks_test(xs, [a, b](double x) { return beta_cdf(a, b, x); });
      report.tests.push_back(statistical(
          "order_statistic_m" + std::to_string(m) + "_i" + std::to_string(i), ks.statistic,
          ks.p_value, ks.samples, config.significance, ks.samples >= kMinKsSamples));
    }
  }

  std::size_t subset_failures = 0, determinism_failures = 0, rechecked = 0;
  std::size_t degenerate = 0, equivariance_failures = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    subset_failures += !records[i].subset_ok;
    determinism_failures += !records[i].deterministic;
    equivariance_failures += !records[i].equivariant;
    degenerate += records[i].degenerate;
    rechecked += i % kDeterminismStride == 0;
  }
  report.tests.push_back(exact("subset", static_cast<double>(subset_failures), config.trials));
  report.tests.push_back(exact("determinism", static_cast<double>(determinism_failures), rechecked));
  if (config.variant == Variant::circle) {
    report.tests.push_back(exact("rotation_equivariance", static_cast<double>(equivariance_failures),
                                 std::min(kEquivarianceTrials, config.trials)));
    TestResult deg = exact("degenerate_configurations", static_cast<double>(degenerate), config.trials);
    deg.mandatory = false;
    report.tests.push_back(deg);
  }
  report.tests.push_back(push_oracle(config));
  report.tests.push_back(t_set_oracle(config));

  report.passed = std::all_of(report.tests.begin(), report.tests.end(),
                              [](const TestResult& t) { return t.passed || !t.mandatory; });
  return report;
}

}  // namespace detthin
