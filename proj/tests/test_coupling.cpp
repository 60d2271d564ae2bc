#include "doctest.h"

#include <cmath>
#include <random>

#include "detthin/coupling.hpp"
#include "detthin/errors.hpp"
#include "detthin/poisson_math.hpp"

using namespace detthin;

namespace {

std::vector<long double> pmf_table(long double m, std::size_t len) {
  std::vector<long double> p(len);
  long double term = std::exp(-m);
  for (std::size_t j = 0; j < len; ++j) {
    if (j > 0) term *= m / static_cast<long double>(j);
    p[j] = term;
  }
  return p;
}

DiscreteLaw poisson_law(double m, std::size_t len) {
  std::vector<double> p;
  for (long double v : pmf_table(m, len)) p.push_back(static_cast<double>(v));
  return DiscreteLaw(p);
}

// Total variation between the output-count mixture and Poisson(mu).
double mixture_tv(const CouplingPlan& plan) {
  const std::size_t len = static_cast<std::size_t>(plan.lambda_eff + 40.0 * std::sqrt(plan.lambda_eff) + 60.0);
  const auto px = pmf_table(plan.lambda_eff, len);
  const auto py = pmf_table(plan.mu_eff, len);
  std::vector<long double> mix(len, 0.0L);
  for (std::size_t n = 0; n < len; ++n) {
    if (px[n] < 1e-300L) continue;
    const DiscreteLaw q = conditional_law(plan, n);
    for (std::size_t j = 0; j < q.size(); ++j) mix[j] += px[n] * q.mass(j);
  }
  long double tv = 0.0L;
  for (std::size_t j = 0; j < len; ++j) tv += std::abs(mix[j] - py[j]);
  return static_cast<double>(tv / 2);
}

}  // namespace

TEST_CASE("mass function follows the three branches") {
  const CouplingPlan plan = build_plan(1.45, 0.7, 1);
  const auto px = pmf_table(1.45L, 60);
  const auto py = pmf_table(0.7L, 60);
  CHECK(plan.k == 1);
  CHECK(std::abs(plan.v_law.mass(0) - static_cast<double>(py[0] - px[0] + px[0] + px[1])) < 1e-12);
  CHECK(std::abs(plan.v_law.mass(1) - static_cast<double>(py[1] - px[1])) < 1e-12);
  for (std::size_t j = 2; j < 12; ++j) {
    CHECK(std::abs(plan.v_law.mass(j) - static_cast<double>(py[j])) < 1e-12);
  }
  CHECK(std::abs(plan.v_law.total() - 1.0) < 1e-12);
  CHECK(plan.v_law.tail().folded_mass <= kTruncationTail);
  CHECK(dominance_check(plan.w_law, plan.v_law));
}

TEST_CASE("plan requires the witness inequalities") {
  CHECK_THROWS_AS(build_plan(1.45, 0.6, 0), PreconditionError);
  CHECK_THROWS_AS(build_plan(1.45, 0.7, 0), PreconditionError);
  CHECK_NOTHROW(build_plan(2.0, 1.0, 1));
}

TEST_CASE("conditional count laws") {
  const CouplingPlan plan = build_plan(5.5, 4.5, 4);
  for (std::size_t n = 0; n <= 4; ++n) {
    const DiscreteLaw q = conditional_law(plan, n);
    CHECK(q.mass(n) == 1.0);
  }
  for (std::size_t n = 5; n < 40; ++n) {
    const DiscreteLaw q = conditional_law(plan, n);
    CHECK(q.support_max() < n);
    CHECK(std::abs(q.total() - 1.0) < 1e-12);
  }
}

TEST_CASE("mixture identity reproduces Poisson(mu)") {
  const struct {
    double lam, mu;
  } pairs[] = {{1.45, 0.7}, {2.0, 1.0}, {5.5, 4.5}, {101.0, 100.0}};
  for (const auto& p : pairs) {
    const FeasibilityWitness w = feasible_ii({p.lam, p.mu, 1.0});
    REQUIRE(w.feasible);
    CAPTURE(p.lam);
    CHECK(mixture_tv(build_plan(p.lam, p.mu, *w.k)) <= 1e-9);
  }
}

TEST_CASE("plans build across the feasible region") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int built = 0;
  for (int i = 0; i < 200; ++i) {
    const double mu = 0.02 + 30.0 * u(gen);
    const double lam = mu + 1.5 * u(gen) + 1e-3;
    const FeasibilityWitness w = feasible_ii({lam, mu, 1.0});
    if (!w.feasible) continue;
    CAPTURE(lam);
    CAPTURE(mu);
    const CouplingPlan plan = build_plan(lam, mu, *w.k);
    for (double m : plan.v_law.masses()) CHECK(m >= 0.0);
    CHECK(dominance_check(plan.w_law, plan.v_law));
    if (built % 10 == 0) CHECK(mixture_tv(plan) <= 1e-9);
    ++built;
  }
  CHECK(built > 60);
}

TEST_CASE("stochastic dominance") {
  const DiscreteLaw a = poisson_law(1.0, 40), b = poisson_law(2.0, 40);
  CHECK(dominance_check(a, a));
  CHECK(dominance_check(b, a));
  CHECK_FALSE(dominance_check(a, b));
}
