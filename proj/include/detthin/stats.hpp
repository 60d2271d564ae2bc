#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace detthin {

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Goodness of fit of observed counts against expected probabilities.
/// Adjacent bins are pooled from both ends until every expected count is at
/// least min_expected. Probability missing from `expected` (the tail past
/// its end) is added to the last bin.
ChiSquareResult chi_square_gof(std::span<const std::size_t> observed,
                               std::span<const double> expected, double min_expected = 5.0);

/// Pearson independence test on a rows x cols table (row-major). Empty rows
/// and columns are dropped.
ChiSquareResult chi_square_independence(std::span<const std::size_t> table, std::size_t rows,
                                        std::size_t cols);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t samples = 0;
};

/// One-sample Kolmogorov-Smirnov test; `cdf` is evaluated at each sample.
/// Uses the asymptotic Kolmogorov law with Stephens' small-sample correction.
template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf cdf);

double chi_square_sf(double statistic, std::size_t degrees_of_freedom);
double kolmogorov_sf(double x);
double beta_cdf(double a, double b, double x);

template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf cdf) {
  KsResult r;
  r.samples = samples.size();
  if (samples.empty()) return r;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  r.statistic = d;
  const double root = std::sqrt(n);
  r.p_value = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
  return r;
}

}  // namespace detthin
