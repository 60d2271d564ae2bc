#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "detthin/fraction.hpp"

namespace detthin {

// Exact integer wide enough for n * 2^128 with headroom.
using Wide = boost::multiprecision::int256_t;

/// Point of the circle in turns: angle = turns / 2^128. Arithmetic is mod 1.
struct CirclePoint {
  u128 turns = 0;

  friend constexpr bool operator==(const CirclePoint&, const CirclePoint&) = default;
  friend constexpr std::strong_ordering operator<=>(const CirclePoint& a, const CirclePoint& b) {
    return a.turns < b.turns ? std::strong_ordering::less
           : a.turns == b.turns ? std::strong_ordering::equal
                                : std::strong_ordering::greater;
  }
};

class CirclePointSet {
 public:
  CirclePointSet() = default;
  // Sorts; throws DomainError on duplicates.
  explicit CirclePointSet(std::vector<CirclePoint> points);
  CirclePointSet(std::initializer_list<CirclePoint> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const CirclePoint> points() const { return points_; }
  const CirclePoint& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  bool contains(CirclePoint p) const;
  bool is_subset_of(const CirclePointSet& other) const;

  friend bool operator==(const CirclePointSet&, const CirclePointSet&) = default;

 private:
  std::vector<CirclePoint> points_;
};

/// Rotation by theta turns (exact, mod 1).
CirclePoint rotate(CirclePoint p, u128 theta);
CirclePointSet rotate(const CirclePointSet& s, u128 theta);

/// Points of `s` other than `origin`, in counterclockwise order starting
/// just after `origin`. Commutes with rotation.
std::vector<CirclePoint> ccw_order_from(const CirclePointSet& s, CirclePoint origin);

/// Gas stations at the points of `s`, each holding fuel for 1/n of the
/// circle. Returns the station from which a counterclockwise circuit never
/// runs dry, or nullopt when more than one station qualifies (the fuel
/// profile minimum is shared). Exact integer arithmetic throughout.
std::optional<CirclePoint> gas_station(const CirclePointSet& s);

/// Half-open counterclockwise arc [start, start + length), both measured in
/// units of 1 / (n * 2^128) of a turn.
struct Arc {
  Wide start;
  Wide length;
};

/// Disjoint union of arcs on a common exact grid of denominator n * 2^128.
class ArcUnion {
 public:
  ArcUnion(std::uint32_t n, std::vector<Arc> arcs);

  std::uint32_t denominator_scale() const { return n_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  Wide denominator() const;
  Wide measure_numerator() const;
  double measure() const;
  bool contains(CirclePoint p) const;
  /// Maximal connected arcs (touching arcs merged, including across 0).
  std::vector<Arc> components() const;

 private:
  std::uint32_t n_;
  std::vector<Arc> arcs_;
};

/// For B of size n-1, the set T of locations x at which x would be the
/// unique gas station of B + {x}: the points where the skew-periodic fuel
/// profile of B reaches a new running minimum. Has measure exactly 1/n.
/// Requires |b| >= 1.
ArcUnion t_set(const CirclePointSet& b);

struct CircleDeletion {
  CirclePointSet kept;
  Fraction48 v;  // rotation-invariant spare uniform
  bool degenerate = false;
  std::optional<CirclePoint> deleted;
};

/// Rotation-equivariant one-point deletion. Removes the gas station z; v is
/// the position of z within its component of t_set(kept), rescaled to
/// [0,1). With a shared minimum nothing is removed, `degenerate` is set and
/// v = 0. For a single point v is 0 (no rotation-invariant uniform exists).
CircleDeletion circle_delete_one(const CirclePointSet& s);

}  // namespace detthin
