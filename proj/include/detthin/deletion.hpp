#pragma once

#include <cstdint>

#include "detthin/discrete_law.hpp"
#include "detthin/fraction.hpp"

namespace detthin {

/// A unit point split into three independent fields: the leading 32 bits
/// reduced to a label in {1..n}, then two 48-bit fractions.
///
///   bits 127..96 -> x = 1 + (value mod n)
///   bits  95..48 -> y
///   bits  47..0  -> z
///
/// Under a uniform point the three fields are independent; x is uniform on
/// {1..n} up to a bias of at most n * 2^-32 per label.
struct TripleCode {
  std::uint32_t x = 1;
  Fraction48 y;
  Fraction48 z;
};

TripleCode encode_split(UnitPoint p, std::uint32_t n);

struct DeletionTrace {
  PointSet kept;
  UnitPoint deleted;
  std::uint32_t k_index = 0;  // 1-based y-rank of the deleted point
  Fraction48 v;               // z-field of the deleted point
};

/// Deterministic one-point deletion. With K = sum of x-labels mod n
/// (residue 0 read as n), removes the point whose y-field is the K-th
/// smallest; equal y-fields are ordered by point value. For n i.i.d.
/// uniform points the survivors are n-1 i.i.d. uniforms, and `v` is uniform
/// and independent of them.
DeletionTrace delete_one(const PointSet& s);

struct MeasureEstimate {
  double estimate = 0.0;
  // Binomial standard error at the same sample count. The sweep is
  // stratified, so this bounds its actual error from above.
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Measure of R(B) = { w : delete_one(B + {w}).kept == B }, which must be
/// 1/(|B|+1). Sweeps the y-field on a jittered grid of `samples` strata and,
/// for each, every x-label weighted by its exact frequency among 32-bit
/// prefixes; the z-field is drawn from the jitter.
MeasureEstimate r_set_measure(const PointSet& b, std::size_t samples, std::uint64_t seed = 1);

/// Splits a 48-bit uniform into two independent 24-bit uniforms: even bit
/// positions and odd bit positions.
std::pair<std::uint32_t, std::uint32_t> split_even_odd(Fraction48 v);

/// Deletion to a random count: removes one point with delete_one, draws a
/// count Z from `law` (support within {0..n-1}) by inverse cdf on the even
/// bits of v, and returns the first Z kept points in an order keyed by the
/// odd bits of v. Output is always a subset of `s`.
PointSet delete_to_count(const PointSet& s, const DiscreteLaw& law);

}  // namespace detthin
