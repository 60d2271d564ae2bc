#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace detthin {

/// Intensities of the source and target processes on a set of given volume.
/// Only the products lambda * volume and mu * volume (the Poisson means of
/// the point counts) enter the feasibility conditions.
struct IntensityPair {
  double lambda = 0.0;
  double mu = 0.0;
  double volume = 1.0;

  double lambda_eff() const { return lambda * volume; }
  double mu_eff() const { return mu * volume; }

  // Throws DomainError unless all fields are finite and positive and
  // lambda > mu.
  void validate_for_thinning() const;
};

/// Decision for one intensity pair. Exactly one of `k` / `blocking_k` is
/// set: `k` witnesses the sufficient condition (pmf and shifted-cdf
/// inequalities), `blocking_k` violates the necessary one.
struct FeasibilityWitness {
  bool feasible = false;
  std::optional<unsigned> k;
  std::optional<unsigned> blocking_k;

  static FeasibilityWitness witness(unsigned k) { return {true, k, std::nullopt}; }
  static FeasibilityWitness blocked(unsigned k) { return {false, std::nullopt, k}; }

  friend bool operator==(const FeasibilityWitness&, const FeasibilityWitness&) = default;
};

// ---------------------------------------------------------------------------
// Poisson numerics. All evaluated in log space; the *_log variants never
// underflow for finite arguments.

double poisson_log_pmf(double mean, unsigned long j);
double poisson_pmf(double mean, unsigned long j);

// log P(X <= n) and log P(X > n).
double poisson_log_cdf(double mean, unsigned long n);
double poisson_log_sf(double mean, unsigned long n);
double poisson_cdf(double mean, unsigned long n);
double poisson_sf(double mean, unsigned long n);

// ---------------------------------------------------------------------------
// Pairwise comparisons of X ~ Poisson(lambda_eff) and Y ~ Poisson(mu_eff).
// Near-ties (relative 1e-14 in log space) count as satisfying "<=", which
// makes the feasible region closed.

inline constexpr double kTieTolerance = 1e-14;

/// P(X = k) <= P(Y = k).
bool pmf_at_most(double lambda_eff, double mu_eff, unsigned long k);
/// P(X <= k+1) <= P(Y <= k).
bool shifted_cdf_at_most(double lambda_eff, double mu_eff, unsigned long k);

/// Scan limit for k: ceil(m + 10 sqrt(m) + 50) for the larger mean m.
unsigned k_scan_limit(double lambda_eff);

struct ScanOptions {
  std::optional<unsigned> k_limit;  // defaults to k_scan_limit
  // Keep scanning past the first k whose pmf inequality fails. The early
  // stop is exact (the pmf inequality cannot recover at larger k), the
  // exhaustive mode exists so tests can confirm that.
  bool exhaustive = false;
};

/// Sufficient-condition scan: smallest k with
///   P(X=k) <= P(Y=k) and P(X<=k+1) <= P(Y<=k).
/// If none exists the result carries the blocking k (the smallest k with
/// P(X=k+1) > P(Y=k+1)).
FeasibilityWitness feasible_ii(const IntensityPair& pair, const ScanOptions& options = {});

/// Independent scan for a blocking k with
///   P(X=k+1) > P(Y=k+1) and P(X<=k+1) > P(Y<=k).
/// When none exists, the witness reported is the smallest k with
/// P(X=k+1) > P(Y=k+1), which is the witness the equivalence argument
/// produces; it can be larger than the one feasible_ii reports.
FeasibilityWitness feasible_iii(const IntensityPair& pair, const ScanOptions& options = {});

inline bool is_feasible(double lambda, double mu, double volume = 1.0) {
  return feasible_ii({lambda, mu, volume}).feasible;
}

/// Critical intensity: the smallest lambda admitting a thinning to mu on a
/// set of the given volume, to within `tol`. The returned value is always
/// on the feasible side.
double lambda_c(double mu, double volume = 1.0, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Integral reformulations of the two inequality families, evaluated by
// adaptive Gauss-Kronrod quadrature (relative tolerance 1e-11). Used as
// independent cross-checks of the direct probability comparisons.

struct CurvePredicates {
  // P(X = k) <= P(Y = k)
  bool pmf_direct = false;
  bool pmf_closed_form = false;  // lambda >= -k log p / (1 - p), p = mu/lambda
  // P(X <= k+1) <= P(Y <= k)
  bool cdf_direct = false;
  bool cdf_scaled_integral = false;  // 1 <= (k+1) int_p^1 e^{(1-s) lambda} s^k ds
  bool cdf_shifted_integral = false;  // int_mu^lambda e^{mu-t} (t/mu)^{k+1} dt >= 1
  double log_scaled_integral = 0.0;   // log of (k+1) int_p^1 ...
  double log_shifted_integral = 0.0;  // log of int_mu^lambda ...
};

CurvePredicates curve_predicates(double lambda, double mu, unsigned k);

/// k = floor(1 / log(1 + 1/mu)): the choice that makes the pmf inequality
/// hold at lambda = mu + 1.
unsigned threshold_k(double mu);

/// int_0^delta e^{-s} (1 + s/mu)^{k+1} ds. With delta = 1 this is the
/// shifted-cdf integral at lambda = mu + 1; it is >= 1 exactly when
/// P(X<=k+1) <= P(Y<=k) for lambda = mu + delta.
double shifted_gap_integral(double mu, double delta, unsigned k);

/// (1 + delta/mu)^{k+1} > e^delta, i.e. P(X=k+1) > P(Y=k+1) at
/// lambda = mu + delta.
bool pmf_excess_at(double mu, double delta, unsigned k);

// ---------------------------------------------------------------------------
// Feasibility region raster.

struct RegionRequest {
  double lambda_min = 0.0;
  double lambda_max = 7.0;
  double mu_min = 0.0;
  double mu_max = 6.0;
  double step = 0.01;
  double volume = 1.0;
  std::vector<unsigned> cdf_curve_ks = {0, 1, 2, 3, 4, 5};
  std::vector<unsigned> pmf_curve_ks = {1, 2, 3, 4};
};

enum class CurveFamily { shifted_cdf, pmf };

struct BoundaryCurve {
  CurveFamily family;
  unsigned k;
  std::vector<std::pair<double, double>> points;  // (lambda, mu)
};

struct RegionGrid {
  double step = 0.0;
  std::vector<double> lambda_axis;
  std::vector<double> mu_axis;
  // Row-major by mu: cells[i_mu * lambda_axis.size() + i_lambda]. Empty
  // unless lambda > mu > 0.
  std::vector<std::optional<FeasibilityWitness>> cells;
  std::vector<BoundaryCurve> curves;

  const std::optional<FeasibilityWitness>& cell(std::size_t i_lambda, std::size_t i_mu) const {
    return cells[i_mu * lambda_axis.size() + i_lambda];
  }
  // Nearest grid cell to (lambda, mu).
  const std::optional<FeasibilityWitness>& cell_at(double lambda, double mu) const;
  std::size_t populated_cells() const;
};

RegionGrid region_raster(const RegionRequest& request);

}  // namespace detthin
