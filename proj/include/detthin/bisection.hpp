#pragma once

#include <cmath>

#include "detthin/errors.hpp"

namespace detthin {

struct BisectionResult {
  double lo;  // predicate false (or bracket end)
  double hi;  // predicate true
  int iterations;
};

/// Locates the threshold of a monotone predicate on [lo, hi] with
/// pred(lo) == false and pred(hi) == true. Stops once hi - lo <= tol or
/// after max_iter halvings; the threshold always lies in (lo, hi].
template <class Predicate>
BisectionResult bisect_threshold(Predicate&& pred, double lo, double hi, double tol,
                                 int max_iter = 200) {
  if (!(lo < hi) || !(tol > 0.0)) {
    throw DomainError("bisection needs lo < hi and tol > 0");
  }
  int it = 0;
  while (hi - lo > tol && it < max_iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // bracket at double resolution
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++it;
  }
  return {lo, hi, it};
}

}  // namespace detthin
