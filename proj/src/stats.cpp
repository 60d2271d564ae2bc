#include "detthin/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <numeric>

#include "detthin/errors.hpp"

namespace detthin {
double chi_square_sf(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  const boost::math::chi_squared_distribution<double> law(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(law, statistic));
}

ChiSquareResult chi_square_gof(std::span<const std::size_t> observed,
                               std::span<const double> expected, double min_expected) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw PreconditionError("observed and expected bins must match");
  }
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::size_t{0}));
  std::vector<double> exp(expected.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    exp[i] = expected[i] * total;
    mass += expected[i];
  }
  exp.back() += std::max(0.0, 1.0 - mass) * total;
  std::vector<double> obs(observed.begin(), observed.end());

  // Pool the low tail forward and the high tail backward.
  std::vector<double> po, pe;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    acc_o += obs[i];
    acc_e += exp[i];
    if (acc_e >= min_expected) {
      po.push_back(acc_o);
      pe.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (pe.empty()) {
      po.push_back(acc_o);
      pe.push_back(acc_e);
    } else {
      po.back() += acc_o;
      pe.back() += acc_e;
    }
  }

  ChiSquareResult r;
  r.bins = pe.size();
  for (std::size_t i = 0; i < pe.size(); ++i) {
    if (pe[i] <= 0.0) continue;
    const double diff = po[i] - pe[i];
    r.statistic += diff * diff / pe[i];
  }
  r.degrees_of_freedom = r.bins > 0 ? r.bins - 1 : 0;
  r.p_value = chi_square_sf(r.statistic, r.degrees_of_freedom);
  return r;
}

ChiSquareResult chi_square_independence(std::span<const std::size_t> table, std::size_t rows,
                                        std::size_t cols) {
  if (table.size() != rows * cols) throw PreconditionError("table shape mismatch");
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = static_cast<double>(table[r * cols + c]);
      row_sum[r] += v;
      col_sum[c] += v;
      total += v;
    }
  }
  ChiSquareResult res;
  std::size_t live_rows = 0, live_cols = 0;
  for (double v : row_sum) live_rows += v > 0.0;
  for (double v : col_sum) live_cols += v > 0.0;
  if (total == 0.0 || live_rows < 2 || live_cols < 2) return res;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (row_sum[r] == 0.0 || col_sum[c] == 0.0) continue;
      const double e = row_sum[r] * col_sum[c] / total;
      const double diff = static_cast<double>(table[r * cols + c]) - e;
      res.statistic += diff * diff / e;
    }
  }
  res.bins = live_rows * live_cols;
  res.degrees_of_freedom = (live_rows - 1) * (live_cols - 1);
  res.p_value = chi_square_sf(res.statistic, res.degrees_of_freedom);
  return res;
}

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  // Alternating series 2 sum (-1)^{j-1} exp(-2 j^2 x^2).
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double beta_cdf(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

}  // namespace detthin
