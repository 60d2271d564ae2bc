#include "detthin/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detthin/errors.hpp"
#include "detthin/poisson_math.hpp"

namespace detthin {
namespace {

constexpr double kClampFloor = -1e-14;

std::size_t truncation_index(double mean) {
  const double log_tail = std::log(kTruncationTail);
  std::size_t n = static_cast<std::size_t>(std::floor(mean));
  while (poisson_log_sf(mean, n) >= log_tail) ++n;
  return n;
}

// log P(V > j)
double log_v_sf(const CouplingPlan& plan, std::size_t j) {
  if (j >= plan.k) return poisson_log_sf(plan.mu_eff, j);
  const double value = poisson_sf(plan.mu_eff, j) -
                       (poisson_cdf(plan.lambda_eff, plan.k) - poisson_cdf(plan.lambda_eff, j));
  return value > 0.0 ? std::log(value) : -std::numeric_limits<double>::infinity();
}

}  // namespace

CouplingPlan build_plan(double lambda_eff, double mu_eff, unsigned k) {
  if (!std::isfinite(lambda_eff) || !std::isfinite(mu_eff) || !(mu_eff > 0.0) ||
      !(lambda_eff > mu_eff)) {
    throw DomainError("coupling needs finite means with lambda > mu > 0");
  }
  if (!pmf_at_most(lambda_eff, mu_eff, k) || !shifted_cdf_at_most(lambda_eff, mu_eff, k)) {
    throw PreconditionError("k = " + std::to_string(k) +
                            " does not witness feasibility for this pair");
  }

  CouplingPlan plan;
  plan.lambda_eff = lambda_eff;
  plan.mu_eff = mu_eff;
  plan.k = k;

  const std::size_t last = std::max<std::size_t>(truncation_index(lambda_eff), k + 1);
  std::vector<double> px(last + 1), py(last + 1);
  for (std::size_t j = 0; j <= last; ++j) {
    px[j] = poisson_pmf(lambda_eff, j);
    py[j] = poisson_pmf(mu_eff, j);
  }
  const double fx_k = poisson_cdf(lambda_eff, k);

  std::vector<double> m(last + 1);
  for (std::size_t j = 0; j <= last; ++j) {
    double value;
    if (j == 0) {
      value = py[0] - px[0] + fx_k;
    } else if (j <= k) {
      value = py[j] - px[j];
    } else {
      value = py[j];
    }
    if (value < kClampFloor) {
      throw ConsistencyError("coupling mass m(" + std::to_string(j) + ") is negative");
    }
    m[j] = std::max(value, 0.0);
  }
  const double v_tail = poisson_sf(mu_eff, last);
  m[last] += v_tail;

  // W = (X-1) 1{X>k}
  std::vector<double> w(last + 1, 0.0);
  w[0] = fx_k;
  for (std::size_t x = k + 1; x <= last; ++x) w[x - 1] += px[x];
  const double w_tail = poisson_sf(lambda_eff, last);
  w[last] += w_tail;

  double total = 0.0;
  for (double v : m) total += v;
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConsistencyError("coupling mass function does not sum to one");
  }
  for (double& v : m) v /= total;

  plan.v_law = DiscreteLaw(std::move(m), TailCut{last, v_tail});
  plan.w_law = DiscreteLaw(std::move(w), TailCut{last, w_tail});
  plan.x_cdf.resize(last + 1);
  plan.v_cdf.resize(last + 1);
  for (std::size_t j = 0; j <= last; ++j) {
    plan.x_cdf[j] = poisson_cdf(lambda_eff, j);
    plan.v_cdf[j] = plan.v_law.cdf(j);
  }
  if (!dominance_check(plan.w_law, plan.v_law)) {
    throw ConsistencyError("W does not stochastically dominate V");
  }
  return plan;
}

DiscreteLaw conditional_law(const CouplingPlan& plan, std::size_t n) {
  if (n <= plan.k) return DiscreteLaw::point_mass(n);

  // Work with 1 - U. Given X = n it lies in (S_X(n), S_X(n-1)]; V = j
  // exactly when it lies in (S_V(j), S_V(j-1)]. Everything is scaled by
  // S_X(n-1) so that far-tail intervals keep their resolution.
  const double log_top = poisson_log_sf(plan.lambda_eff, n - 1);
  const double low = std::exp(poisson_log_sf(plan.lambda_eff, n) - log_top);
  auto scaled_v_sf = [&](std::size_t j) { return std::exp(log_v_sf(plan, j) - log_top); };

  std::vector<double> masses(n, 0.0);
  double upper = 1.0;  // min(1, S_V(j-1)) for j = 0
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    // V <= W = n-1 pathwise, so the last cell absorbs rounding.
    const double lower = j + 1 == n ? low : std::max(low, scaled_v_sf(j));
    const double overlap = upper - lower;
    if (overlap > 0.0) {
      masses[j] = overlap;
      total += overlap;
    }
    upper = std::min(upper, lower);
    if (!(upper > low)) break;
  }
  if (!(total > 0.0)) throw ConsistencyError("empty conditional count law");
  for (double& v : masses) v /= total;
  return DiscreteLaw(std::move(masses));
}

bool dominance_check(const DiscreteLaw& w_law, const DiscreteLaw& v_law) {
  const std::size_t len = std::max(w_law.size(), v_law.size());
  for (std::size_t j = 0; j < len; ++j) {
    if (w_law.cdf(j) > v_law.cdf(j) + 1e-12) return false;
  }
  return true;
}

}  // namespace detthin
