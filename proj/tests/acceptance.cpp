// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Writes acceptance_region.{csv,svg} to the working
// directory for visual inspection of the feasibility region.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "detthin/circle.hpp"
#include "detthin/counter_hash.hpp"
#include "detthin/coupling.hpp"
#include "detthin/deletion.hpp"
#include "detthin/errors.hpp"
#include "detthin/poisson_math.hpp"
#include "detthin/region_io.hpp"
#include "detthin/thinning.hpp"
#include "detthin/verify.hpp"

using namespace detthin;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;  // 0: no hard limit
  std::function<Outcome()> run;
};

// Random (lambda, mu) with 0 < mu < lambda <= 20.
struct PairStream {
  CounterStream rng;
  std::uint64_t next = 0;
  std::pair<double, double> operator()() {
    double a = 20.0 * (1.0 - rng.uniform(0, next++));
    double b = 20.0 * (1.0 - rng.uniform(0, next++));
    if (a == b) b = std::nextafter(b, 0.0);
    return a > b ? std::pair{a, b} : std::pair{b, a};
  }
};

std::vector<std::pair<double, double>> random_pairs(std::size_t count, std::uint64_t seed) {
  PairStream s{CounterStream(seed, 0)};
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(s());
  return out;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome example_pairs() {
  const FeasibilityWitness a = feasible_ii({1.45, 0.7, 1.0});
  const FeasibilityWitness b = feasible_ii({1.45, 0.6, 1.0});
  const bool ok = a == FeasibilityWitness::witness(1) && b == FeasibilityWitness::blocked(0);
  return {ok, "(1.45,0.7) k=" + (a.k ? std::to_string(*a.k) : "-") + ", (1.45,0.6) blocking_k=" +
                  (b.blocking_k ? std::to_string(*b.blocking_k) : "-")};
}

Outcome condition_equivalence() {
  std::size_t mismatches = 0, infeasible = 0;
  for (const auto& [lam, mu] : random_pairs(10000, 2)) {
    const FeasibilityWitness ii = feasible_ii({lam, mu, 1.0});
    const FeasibilityWitness iii = feasible_iii({lam, mu, 1.0});
    infeasible += !ii.feasible;
    if (ii.feasible != iii.feasible || (!ii.feasible && ii.blocking_k != iii.blocking_k)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 10000 pairs (" +
                               std::to_string(infeasible) + " infeasible)"};
}

Outcome monotone_in_k() {
  std::size_t pmf_fail = 0, cdf_fail = 0;
  for (const auto& [lam, mu] : random_pairs(10000, 2)) {
    bool pmf_next = pmf_at_most(lam, mu, 0);
    bool cdf_prev = shifted_cdf_at_most(lam, mu, 0);
    for (unsigned k = 0; k <= 200; ++k) {
      const bool pmf_here = pmf_next;
      pmf_next = pmf_at_most(lam, mu, k + 1);
      if (pmf_next && !pmf_here) ++pmf_fail;
      const bool cdf_next = shifted_cdf_at_most(lam, mu, k + 1);
      if (cdf_prev && !cdf_next) ++cdf_fail;
      cdf_prev = cdf_next;
    }
  }
  return {pmf_fail == 0 && cdf_fail == 0,
          "pmf-part violations " + std::to_string(pmf_fail) + ", cdf-part violations " +
              std::to_string(cdf_fail) + " (10000 pairs, k <= 200)"};
}

Outcome upper_bound_and_trend() {
  bool ok = true;
  for (double mu : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0}) ok = ok && is_feasible(mu + 1.0, mu);
  const double gap = lambda_c(100.0) - 100.0;
  // Brute-force value of the gap at mu = 100.
  const bool trend = gap >= 0.8 && std::abs(gap - 0.9966849) < 1e-6;
  return {ok && trend, std::string("mu+1 feasible at all 8 mu: ") + (ok ? "yes" : "no") +
                           fmt("; lambda_c(100) - 100 = %.7f", gap)};
}

Outcome monotone_in_lambda() {
  PairStream s{CounterStream(5, 0)};
  const CounterStream delta(5, 1);
  std::size_t tested = 0, failures = 0, draws = 0;
  while (tested < 1000) {
    const auto [lam, mu] = s();
    if (!is_feasible(lam, mu)) continue;
    const double lam2 = lam + std::abs(4.0 * delta.uniform(0, draws++) - 2.0);
    if (!is_feasible(lam2, mu)) ++failures;
    if (!is_feasible(lam2, lam2 * mu / lam)) ++failures;
    ++tested;
  }
  return {failures == 0, std::to_string(failures) + " failures over " + std::to_string(tested) +
                             " feasible pairs (shifted and proportional)"};
}

Outcome push_oracle() {
  std::size_t outside = 0, total = 0;
  double worst = 0.0, worst_abs = 0.0;
  for (std::uint32_t n = 2; n <= 6; ++n) {
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
      const CounterStream rng(6, n * 1000 + rep);
      std::vector<UnitPoint> pts;
      for (std::uint32_t j = 0; j + 1 < n; ++j) pts.push_back(UnitPoint{rng.word128(1, j)});
      const MeasureEstimate m = r_set_measure(PointSet(pts), 100000, rep + 1);
      const double z = std::abs(m.estimate - 1.0 / n) / m.standard_error;
      worst = std::max(worst, z);
      worst_abs = std::max(worst_abs, std::abs(m.estimate - 1.0 / n));
      outside += z > 3.0;
      ++total;
    }
  }
  return {outside == 0, std::to_string(outside) + "/" + std::to_string(total) +
                            " sets outside 3 SE" + fmt(" (largest |z| = %.3g, largest |estimate - 1/n| = %.3g)", worst, worst_abs)};
}

Outcome t_set_measure() {
  double worst = 0.0;
  std::size_t exact = 0, total = 0;
  for (std::uint32_t n = 2; n <= 10; ++n) {
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      const CounterStream rng(7, n * 1000 + rep);
      std::vector<CirclePoint> pts;
      for (std::uint32_t j = 0; j + 1 < n; ++j) pts.push_back(CirclePoint{rng.word128(1, j)});
      const ArcUnion t = t_set(CirclePointSet(pts));
      worst = std::max(worst, std::abs(t.measure() - 1.0 / n));
      exact += t.measure_numerator() * n == t.denominator();
      ++total;
    }
  }
  return {worst <= 1e-12 && exact == total,
          fmt("max |measure - 1/n| = %.3g; ", worst) + std::to_string(exact) + "/" +
              std::to_string(total) + " exactly 1/n in integer arithmetic"};
}

Outcome end_to_end() {
  const std::pair<double, double> pairs[] = {{2.0, 1.0}, {1.45, 0.7}, {5.5, 4.5}};
  bool ok = true;
  std::string detail;
  for (const auto& [lam, mu] : pairs) {
    TrialConfig c;
    c.intensities = {lam, mu, 1.0};
    c.trials = 100000;
    c.seed = 8;
    TestReport r = run_suite(c);
    std::string note;
    if (!r.passed) {
      // One re-run with a fresh seed is allowed; two failures in a row are red.
      c.seed += 1;
      r = run_suite(c);
      note = " after re-run";
    }
    double min_p = 1.0;
    for (const TestResult& t : r.tests) {
      if (!t.exact && t.mandatory) min_p = std::min(min_p, t.p_value);
    }
    ok = ok && r.passed;
    detail += fmt("(%.2f,%.2f) ", lam, mu) + (r.passed ? "pass" : "FAIL") + note +
              fmt(" min p %.3f; ", min_p);
  }
  return {ok, detail};
}

Outcome mixture_identity() {
  const std::pair<double, double> pairs[] = {{2.0, 1.0}, {1.45, 0.7}, {5.5, 4.5}};
  double worst = 0.0;
  for (const auto& [lam, mu] : pairs) {
    const FeasibilityWitness w = feasible_ii({lam, mu, 1.0});
    const CouplingPlan plan = build_plan(lam, mu, *w.k);
    const std::size_t len = 200;
    std::vector<long double> mix(len, 0.0L), py(len), px(len);
    long double tx = std::exp(static_cast<long double>(-lam)), ty = std::exp(static_cast<long double>(-mu));
    for (std::size_t j = 0; j < len; ++j) {
      if (j) {
        tx *= lam / static_cast<long double>(j);
        ty *= mu / static_cast<long double>(j);
      }
      px[j] = tx;
      py[j] = ty;
    }
    for (std::size_t n = 0; n < len; ++n) {
      const DiscreteLaw q = conditional_law(plan, n);
      for (std::size_t j = 0; j < q.size(); ++j) mix[j] += px[n] * q.mass(j);
    }
    long double tv = 0.0L;
    for (std::size_t j = 0; j < len; ++j) tv += std::abs(mix[j] - py[j]);
    worst = std::max(worst, static_cast<double>(tv / 2));
  }
  return {worst <= 1e-9, fmt("max total variation %.3g over the three pairs", worst)};
}

Outcome circle_equivariance() {
  std::size_t failures = 0, thinned = 0, degenerate = 0, checks = 0;
  const PoissonThinning slow(2.0, 1.0), fast(5.5, 4.5);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const CounterStream rng(10, i);
    const PoissonThinning& t = i % 2 ? fast : slow;
    const CirclePointSet s = sample_circle_process(i % 2 ? 5.5 : 2.0, rng);
    const auto base = t.apply(s);
    thinned += base.points.size() < s.size();
    degenerate += base.degenerate;
    for (std::uint64_t r = 0; r < 10; ++r) {
      const u128 theta = rng.word128(20, r);
      const auto turned = t.apply(rotate(s, theta));
      failures += !(turned.points == rotate(base.points, theta) && turned.degenerate == base.degenerate);
      ++checks;
    }
  }
  return {failures == 0 && thinned > 100,
          std::to_string(failures) + "/" + std::to_string(checks) + " rotations disagree; " +
              std::to_string(thinned) + " sets actually thinned, " + std::to_string(degenerate) +
              " degenerate"};
}

Outcome tiling() {
  const BoxSpec region({0.0}, {20.0});
  const double lam = 1.5, mu = 1.0;
  bool ok = true;
  std::size_t perturbed = 0, differing = 0;
  double side = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const CounterStream rng(11, i);
    const EuclideanPointSet pts = sample_box_process(lam, region, rng);
    const TileResult base = tile_thin(pts, region, lam, mu);
    side = base.tile_side;
    ok = ok && base.unthinned_cells.empty() && base.cells_per_axis == std::vector<std::size_t>{10};
    const std::size_t tile = rng.word(30, 0) % 10;
    const double lo = 2.0 * tile, hi = lo + 2.0;
    EuclideanPointSet moved = pts;
    for (BoxPoint& p : moved.points) {
      const double x = region.coordinate(p[0], 0);
      if (x >= lo && x < hi) {
        p[0].bits ^= static_cast<u128>(rng.word(31, 0)) | 1;  // low-order bits only
        ++perturbed;
      }
    }
    const TileResult after = tile_thin(moved, region, lam, mu);
    auto others = [&](const EuclideanPointSet& s) {
      std::vector<BoxPoint> out;
      for (const BoxPoint& p : s.points) {
        const double x = region.coordinate(p[0], 0);
        if (x < lo || x >= hi) out.push_back(p);
      }
      return out;
    };
    differing += others(base.points) != others(after.points);
  }
  const FeasibilityWitness w = feasible_ii({lam * side, mu * side, 1.0});
  ok = ok && std::abs(side - 2.0) < 1e-12 && differing == 0 && perturbed > 0 && w.feasible;
  return {ok, fmt("tile length %.6g; effective means (%.6g, %.6g) ", side, lam * side, mu * side) +
                  (w.feasible ? "feasible" : "infeasible") + "; " + std::to_string(differing) +
                  "/200 runs changed outside the perturbed tile"};
}

Outcome region_raster_check() {
  const RegionGrid g = region_raster({});
  {
    std::ofstream csv("acceptance_region.csv");
    write_region_csv(csv, g);
    std::ofstream svg("acceptance_region.svg");
    write_region_svg(svg, g);
  }
  // Half-plane lambda >= mu + 1.
  std::size_t half_plane_misses = 0;
  for (std::size_t im = 0; im < g.mu_axis.size(); ++im) {
    for (std::size_t il = 0; il < g.lambda_axis.size(); ++il) {
      const auto& c = g.cell(il, im);
      if (c && g.lambda_axis[il] - g.mu_axis[im] >= 1.0 - 1e-9 && !c->feasible) ++half_plane_misses;
    }
  }
  // Closed: the critical intensity itself is feasible, just below is not.
  std::size_t open_rows = 0;
  for (double mu : {0.05, 0.3, 0.7, 1.0, 1.5, 2.2, 3.0, 4.4, 5.9}) {
    const double lc = lambda_c(mu, 1.0, 1e-13);
    if (!is_feasible(lc, mu) || is_feasible(lc - 1e-9, mu)) ++open_rows;
  }
  // Notches: columns where an infeasible mu sits below a feasible one.
  std::vector<double> notched;
  for (std::size_t il = 0; il < g.lambda_axis.size(); ++il) {
    bool blocked_below = false;
    for (std::size_t im = 0; im < g.mu_axis.size(); ++im) {
      const auto& c = g.cell(il, im);
      if (!c) continue;
      if (!c->feasible) {
        blocked_below = true;
      } else if (blocked_below) {
        notched.push_back(g.lambda_axis[il]);
        break;
      }
    }
  }
  std::size_t halves_with_notch = 0;
  for (int n = 1; n <= 6; ++n) {
    const double h = n + 0.5;
    for (double l : notched) {
      if (l > h - 0.15 && l < h + 0.05) {
        ++halves_with_notch;
        break;
      }
    }
  }
  const bool cells = g.cell_at(1.45, 0.7) == std::optional(FeasibilityWitness::witness(1)) &&
                     g.cell_at(1.45, 0.6) == std::optional(FeasibilityWitness::blocked(0));
  const bool ok = half_plane_misses == 0 && open_rows == 0 && halves_with_notch == 6 && cells;
  return {ok, std::to_string(half_plane_misses) + " infeasible cells with lambda >= mu+1; " +
                  std::to_string(open_rows) + " open boundary rows; notches near " +
                  std::to_string(halves_with_notch) + "/6 half-integers (" +
                  std::to_string(notched.size()) + " notched columns); example cells " +
                  (cells ? "ok" : "wrong") + "; wrote acceptance_region.svg"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "example pair feasibility", 0.001, example_pairs},
      {2, "conditions (ii) and (iii) agree", 5.0, condition_equivalence},
      {3, "monotonicity of both inequality families in k", 10.0, monotone_in_k},
      {4, "mu+1 upper bound and lambda_c(100) trend", 1.0, upper_bound_and_trend},
      {5, "monotone in lambda and along rays", 5.0, monotone_in_lambda},
      {6, "deletion push oracle", 0.0, push_oracle},
      {7, "gas-station arc set measure", 10.0, t_set_measure},
      {8, "end-to-end output is Poisson(mu)", 0.0, end_to_end},
      {9, "coupling mixture identity", 1.0, mixture_identity},
      {10, "circle thinning rotation equivariance", 30.0, circle_equivariance},
      {11, "tiling length, locality and cube feasibility", 10.0, tiling},
      {12, "feasibility region raster", 30.0, region_raster_check},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0.0 || secs < c.budget_seconds;
    const bool pass = o.passed && in_time;
    failed += !pass;
    std::printf("%s criterion %2d: %s | %s | %.3f s%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                o.detail.c_str(), secs, in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
