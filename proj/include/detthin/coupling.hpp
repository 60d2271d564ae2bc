#pragma once

#include <cstddef>
#include <vector>

#include "detthin/discrete_law.hpp"

namespace detthin {

/// Monotone coupling of X ~ Poisson(lambda_eff) and Y ~ Poisson(mu_eff)
/// with X = Y when X <= k and X > Y when X > k.
///
/// V has mass function
///   m(0) = P(Y=0) - P(X=0) + P(X<=k)
///   m(j) = P(Y=j) - P(X=j)              1 <= j <= k
///   m(j) = P(Y=j)                       j > k
/// and W = (X-1) 1{X>k}. W dominates V stochastically. Both are realized
/// from one uniform U through their quantile functions, X = F_X^{-1}(U),
/// V = F_V^{-1}(U), so V <= W pathwise and Y = X 1{X<=k} + V 1{X>k}.
///
/// Tables are truncated at the first index where the upper tail of X drops
/// below 1e-12; the remainder is folded into the last atom.
struct CouplingPlan {
  double lambda_eff = 0.0;
  double mu_eff = 0.0;
  unsigned k = 0;
  DiscreteLaw v_law;
  DiscreteLaw w_law;
  std::vector<double> x_cdf;
  std::vector<double> v_cdf;
};

inline constexpr double kTruncationTail = 1e-12;

/// Throws PreconditionError when (lambda_eff, mu_eff, k) does not satisfy
/// the sufficient condition, ConsistencyError when m goes negative beyond
/// rounding or W fails to dominate V.
CouplingPlan build_plan(double lambda_eff, double mu_eff, unsigned k);

/// Law of Y given X = n under the quantile realization: a point mass at n
/// for n <= k, otherwise the push-forward of U restricted to
/// [F_X(n-1), F_X(n)) under F_V^{-1}, supported on {0..n-1}. Computed on
/// upper-tail probabilities so it stays accurate far into the tail of X.
DiscreteLaw conditional_law(const CouplingPlan& plan, std::size_t n);

/// cdf(w) <= cdf(v) + 1e-12 at every index up to the longer law.
bool dominance_check(const DiscreteLaw& w_law, const DiscreteLaw& v_law);

}  // namespace detthin
