#include "detthin/poisson_math.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "detthin/bisection.hpp"
#include "detthin/errors.hpp"

namespace detthin {
namespace {

void check_mean(double mean) {
  if (!std::isfinite(mean) || !(mean > 0.0)) {
    throw DomainError("Poisson mean must be finite and positive");
  }
}

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(n!) - log(sqrt(2 pi n) (n/e)^n)
double stirling_error(double n) {
  static constexpr std::array<double, 16> kTable = {
      0.0,
      0.08106146679532725822,
      0.041340695955409294094,
      0.027677925684998339149,
      0.020790672103765093112,
      0.016644691189821192163,
      0.013876128823070747999,
      0.011896709945891770095,
      0.010411265261972096497,
      0.0092554621827127329177,
      0.0083305634333628712565,
      0.007573675487951840795,
      0.0069428401072095298657,
      0.0064089941880042070684,
      0.0059513701127588477356,
      0.005554733551962801371,
  };
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) return kTable[static_cast<std::size_t>(n)];
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, accurate when x is close to np.
double deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log(1 - e^x) for x <= 0.
double log1m_exp(double x) {
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

// log P(X <= n) by summing downward from the anchor term; requires n < mean
// so the terms decrease.
double lower_tail_direct(double mean, unsigned long n) {
  const double anchor = poisson_log_pmf(mean, n);
  CompensatedSum sum;
  sum.add(1.0);
  double t = 1.0;
  for (unsigned long j = n; j > 0; --j) {
    t *= static_cast<double>(j) / mean;
    sum.add(t);
    if (t < 1e-18 * sum.value()) break;
  }
  return anchor + std::log(sum.value());
}

// log P(X > n) by summing upward; requires n + 1 > mean.
double upper_tail_direct(double mean, unsigned long n) {
  const double anchor = poisson_log_pmf(mean, n + 1);
  CompensatedSum sum;
  sum.add(1.0);
  double t = 1.0;
  for (unsigned long j = n + 2;; ++j) {
    t *= mean / static_cast<double>(j);
    sum.add(t);
    if (t < 1e-18 * sum.value()) break;
  }
  return anchor + std::log(sum.value());
}

double tie_slack(double scale) { return kTieTolerance * std::max(1.0, std::abs(scale)); }

unsigned first_pmf_excess(double lambda_eff, double mu_eff) {
  // Smallest k with P(X=k+1) > P(Y=k+1). Exists because lambda > mu.
  unsigned k = 0;
  while (pmf_at_most(lambda_eff, mu_eff, k + 1)) ++k;
  return k;
}

template <class F>
double integrate(F&& f, double a, double b, const char* what) {
  constexpr double kRelTol = 1e-11;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, kRelTol, &error, &l1);
  if (!std::isfinite(value) || error > 4 * kRelTol * l1 + 1e-300) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "quadrature did not converge for " << what << " on [" << a << ", " << b
        << "]: estimate " << value << ", error " << error << ", L1 " << l1;
    throw NumericError(msg.str());
  }
  return value;
}

std::vector<double> make_axis(double lo, double hi, double step, const char* name) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) || !(step > 0.0) ||
      !(hi >= lo)) {
    throw DomainError(std::string("degenerate ") + name + " range");
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = lo + static_cast<double>(i) * step;
  return axis;
}

}  // namespace

void IntensityPair::validate_for_thinning() const {
  if (!std::isfinite(lambda) || !std::isfinite(mu) || !std::isfinite(volume) ||
      !(lambda > 0.0) || !(mu > 0.0) || !(volume > 0.0)) {
    throw DomainError("intensities and volume must be finite and positive");
  }
  if (!(lambda > mu)) {
    throw DomainError("thinning target must be strictly smaller (need lambda > mu)");
  }
}

double poisson_log_pmf(double mean, unsigned long j) {
  check_mean(mean);
  if (j == 0) return -mean;
  const double x = static_cast<double>(j);
  return -stirling_error(x) - deviance(x, mean) - 0.5 * std::log(2.0 * std::numbers::pi * x);
}

double poisson_pmf(double mean, unsigned long j) { return std::exp(poisson_log_pmf(mean, j)); }

double poisson_log_cdf(double mean, unsigned long n) {
  check_mean(mean);
  if (static_cast<double>(n) < mean) return lower_tail_direct(mean, n);
  return log1m_exp(upper_tail_direct(mean, n));
}

double poisson_log_sf(double mean, unsigned long n) {
  check_mean(mean);
  if (static_cast<double>(n) < mean) return log1m_exp(lower_tail_direct(mean, n));
  return upper_tail_direct(mean, n);
}

double poisson_cdf(double mean, unsigned long n) { return std::exp(poisson_log_cdf(mean, n)); }
double poisson_sf(double mean, unsigned long n) { return std::exp(poisson_log_sf(mean, n)); }

bool pmf_at_most(double lambda_eff, double mu_eff, unsigned long k) {
  // log P(X=k) - log P(Y=k) = (mu - lambda) + k log(lambda/mu)
  const double growth = static_cast<double>(k) * std::log(lambda_eff / mu_eff);
  const double gap = lambda_eff - mu_eff;
  return growth - gap <= tie_slack(std::max(gap, growth));
}

bool shifted_cdf_at_most(double lambda_eff, double mu_eff, unsigned long k) {
  const double log_y = poisson_log_cdf(mu_eff, k);
  if (log_y > -std::numbers::ln2) {
    // Both sides close to one: compare upper tails, which keep full
    // relative precision.
    const double sf_x = poisson_log_sf(lambda_eff, k + 1);
    const double sf_y = poisson_log_sf(mu_eff, k);
    return sf_x >= sf_y - tie_slack(sf_y);
  }
  const double log_x = poisson_log_cdf(lambda_eff, k + 1);
  return log_x <= log_y + tie_slack(log_y);
}

unsigned k_scan_limit(double lambda_eff) {
  check_mean(lambda_eff);
  return static_cast<unsigned>(std::ceil(lambda_eff + 10.0 * std::sqrt(lambda_eff) + 50.0));
}

FeasibilityWitness feasible_ii(const IntensityPair& pair, const ScanOptions& options) {
  pair.validate_for_thinning();
  const double lam = pair.lambda_eff();
  const double mu = pair.mu_eff();
  const unsigned limit = options.k_limit.value_or(k_scan_limit(lam));
  for (unsigned k = 0; k <= limit; ++k) {
    if (!pmf_at_most(lam, mu, k)) {
      if (options.exhaustive) continue;
      break;
    }
    if (shifted_cdf_at_most(lam, mu, k)) return FeasibilityWitness::witness(k);
  }
  return FeasibilityWitness::blocked(first_pmf_excess(lam, mu));
}

FeasibilityWitness feasible_iii(const IntensityPair& pair, const ScanOptions& options) {
  pair.validate_for_thinning();
  const double lam = pair.lambda_eff();
  const double mu = pair.mu_eff();
  const unsigned limit = options.k_limit.value_or(k_scan_limit(lam));
  for (unsigned k = 0; k <= limit; ++k) {
    const bool pmf_excess = !pmf_at_most(lam, mu, k + 1);
    if (pmf_excess && !shifted_cdf_at_most(lam, mu, k)) {
      return FeasibilityWitness::blocked(k);
    }
  }
  return FeasibilityWitness::witness(first_pmf_excess(lam, mu));
}

double lambda_c(double mu, double volume, double tol) {
  if (!std::isfinite(mu) || !(mu > 0.0) || !std::isfinite(volume) || !(volume > 0.0)) {
    throw DomainError("mu and volume must be finite and positive");
  }
  if (!std::isfinite(tol) || !(tol > 0.0)) throw DomainError("tolerance must be positive");
  // Feasible at effective means (m + 1, m), i.e. lambda = mu + 1/volume.
  const double hi = mu + 1.0 / volume;
  if (!is_feasible(hi, mu, volume)) {
    throw ConsistencyError("lambda = mu + 1/volume reported infeasible");
  }
  const auto result = bisect_threshold(
      [&](double lam) { return is_feasible(lam, mu, volume); }, mu, hi, tol, 200);
  return result.hi;
}

CurvePredicates curve_predicates(double lambda, double mu, unsigned k) {
  IntensityPair{lambda, mu, 1.0}.validate_for_thinning();
  CurvePredicates out;
  const double p = mu / lambda;
  const double kd = static_cast<double>(k);

  out.pmf_direct = pmf_at_most(lambda, mu, k);
  const double pmf_bound = -kd * std::log(p) / (1.0 - p);
  out.pmf_closed_form = lambda >= pmf_bound - tie_slack(pmf_bound);
  out.cdf_direct = shifted_cdf_at_most(lambda, mu, k);

  {
    // exponent (1-s) lambda + k log s is concave with peak at s = k/lambda
    const double peak = std::clamp(kd / lambda, p, 1.0);
    auto exponent = [&](double s) { return (1.0 - s) * lambda + (k ? kd * std::log(s) : 0.0); };
    const double shift = exponent(peak);
    const double integral = integrate(
        [&](double s) { return std::exp(exponent(s) - shift); }, p, 1.0, "scaled cdf integral");
    out.log_scaled_integral = std::log(kd + 1.0) + shift + std::log(integral);
  }
  {
    const double peak = std::clamp(kd + 1.0, mu, lambda);
    auto exponent = [&](double t) { return mu - t + (kd + 1.0) * std::log(t / mu); };
    const double shift = exponent(peak);
    const double integral =
        integrate([&](double t) { return std::exp(exponent(t) - shift); }, mu, lambda,
                  "shifted cdf integral");
    out.log_shifted_integral = shift + std::log(integral);
  }
  constexpr double kQuadratureSlack = 1e-10;
  out.cdf_scaled_integral = out.log_scaled_integral >= -kQuadratureSlack;
  out.cdf_shifted_integral = out.log_shifted_integral >= -kQuadratureSlack;
  return out;
}

unsigned threshold_k(double mu) {
  check_mean(mu);
  return static_cast<unsigned>(std::floor(1.0 / std::log1p(1.0 / mu)));
}

double shifted_gap_integral(double mu, double delta, unsigned k) {
  check_mean(mu);
  if (!std::isfinite(delta) || !(delta > 0.0)) throw DomainError("delta must be positive");
  const double power = static_cast<double>(k) + 1.0;
  return integrate([&](double s) { return std::exp(-s + power * std::log1p(s / mu)); }, 0.0,
                   delta, "gap integral");
}

bool pmf_excess_at(double mu, double delta, unsigned k) {
  check_mean(mu);
  return (static_cast<double>(k) + 1.0) * std::log1p(delta / mu) > delta;
}

const std::optional<FeasibilityWitness>& RegionGrid::cell_at(double lambda, double mu) const {
  auto index = [this](const std::vector<double>& axis, double v) {
    if (axis.empty()) throw DomainError("empty region axis");
    const double pos = step > 0.0 ? std::round((v - axis.front()) / step) : 0.0;
    if (pos < 0.0 || pos >= static_cast<double>(axis.size())) {
      throw DomainError("point outside the raster");
    }
    return static_cast<std::size_t>(pos);
  };
  return cell(index(lambda_axis, lambda), index(mu_axis, mu));
}

std::size_t RegionGrid::populated_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
}

RegionGrid region_raster(const RegionRequest& request) {
  if (!std::isfinite(request.volume) || !(request.volume > 0.0)) {
    throw DomainError("volume must be positive");
  }
  RegionGrid grid;
  grid.step = request.step;
  grid.lambda_axis = make_axis(request.lambda_min, request.lambda_max, request.step, "lambda");
  grid.mu_axis = make_axis(request.mu_min, request.mu_max, request.step, "mu");
  grid.cells.resize(grid.lambda_axis.size() * grid.mu_axis.size());

  for (std::size_t im = 0; im < grid.mu_axis.size(); ++im) {
    const double mu = grid.mu_axis[im];
    if (!(mu > 0.0)) continue;
    for (std::size_t il = 0; il < grid.lambda_axis.size(); ++il) {
      const double lam = grid.lambda_axis[il];
      if (!(lam > mu)) continue;
      grid.cells[im * grid.lambda_axis.size() + il] = feasible_ii({lam, mu, request.volume});
    }
  }

  const double vol = request.volume;
  const double lam_max = grid.lambda_axis.back();
  auto trace = [&](CurveFamily family, unsigned k, auto&& pred) {
    BoundaryCurve curve{family, k, {}};
    for (double mu : grid.mu_axis) {
      if (!(mu > 0.0) || !(lam_max > mu)) continue;
      auto at = [&](double lam) { return pred(lam * vol, mu * vol); };
      if (!at(lam_max)) continue;
      const auto root = bisect_threshold(at, mu, lam_max, 1e-10);
      if (root.lo == mu) continue;  // predicate true all the way down
      curve.points.emplace_back(root.hi, mu);
    }
    grid.curves.push_back(std::move(curve));
  };
  for (unsigned k : request.cdf_curve_ks) {
    trace(CurveFamily::shifted_cdf, k,
          [k](double lam, double mu) { return shifted_cdf_at_most(lam, mu, k); });
  }
  for (unsigned k : request.pmf_curve_ks) {
    trace(CurveFamily::pmf, k, [k](double lam, double mu) {
      // Only meaningful where the pmf curve exists (mean of Y below k).
      return mu >= static_cast<double>(k) || pmf_at_most(lam, mu, k);
    });
  }
  return grid;
}

}  // namespace detthin
