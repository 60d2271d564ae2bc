#pragma once

#include <cstddef>
#include <vector>

#include "detthin/circle.hpp"
#include "detthin/coupling.hpp"
#include "detthin/fraction.hpp"
#include "detthin/poisson_math.hpp"

namespace detthin {

/// Deterministic thinning for fixed effective means. A set with at most k
/// points is kept as is; a set of n > k points loses one point through the
/// one-point deletion and then keeps a Q_n-distributed number of the
/// survivors, where Q_n is the count law given X = n under the monotone
/// coupling. Consumes no randomness: all of it comes from the input points.
class PoissonThinning {
 public:
  // Throws DomainError if lambda_eff <= mu_eff, FeasibilityError if no
  // thinning exists.
  PoissonThinning(double lambda_eff, double mu_eff);

  unsigned k() const { return plan_.k; }
  const CouplingPlan& plan() const { return plan_; }
  DiscreteLaw count_law(std::size_t n) const;

  PointSet apply(const PointSet& s) const;

  struct CircleResult {
    CirclePointSet points;
    bool degenerate = false;  // shared gas-station minimum; input kept
  };
  /// Rotation-equivariant variant: survivors are ordered counterclockwise
  /// from the deleted point before the keyed selection.
  CircleResult apply(const CirclePointSet& s) const;

 private:
  CouplingPlan plan_;
  std::vector<DiscreteLaw> cached_laws_;  // index n, for n <= truncation
};

PointSet thin_unit(const PointSet& s, double lambda, double mu);
PoissonThinning::CircleResult thin_circle(const CirclePointSet& s, double lambda, double mu);

// ---------------------------------------------------------------------------
// Boxes.

struct BoxSpec {
  std::vector<double> lower;
  std::vector<double> upper;

  BoxSpec() = default;
  BoxSpec(std::vector<double> lo, std::vector<double> hi);  // validates
  static BoxSpec unit(std::size_t dimension);

  std::size_t dimension() const { return lower.size(); }
  double volume() const;
  double extent(std::size_t axis) const { return upper[axis] - lower[axis]; }
  // Real coordinate of a box-relative fraction.
  double coordinate(UnitPoint fraction, std::size_t axis) const;
  // Box-relative fraction of a real coordinate; throws DomainError unless
  // lower < x < upper.
  UnitPoint fraction_of(double x, std::size_t axis) const;
};

/// Point of a box, one box-relative 128-bit fraction per axis.
using BoxPoint = std::vector<UnitPoint>;

struct EuclideanPointSet {
  std::vector<BoxPoint> points;

  std::size_t size() const { return points.size(); }
  friend bool operator==(const EuclideanPointSet&, const EuclideanPointSet&) = default;
};

/// Measure-preserving map from a box to [0,1): the affine rescaling for
/// d = 1, otherwise the leading 128/d bits of each coordinate interleaved
/// (first axis most significant).
UnitPoint box_to_unit(const BoxPoint& p);
/// Inverse of box_to_unit up to the 128/d bits per axis it keeps.
BoxPoint unit_to_box(UnitPoint u, std::size_t dimension);

struct AdaptedSet {
  PointSet unit;
  std::vector<std::size_t> source_index;  // unit[i] came from input point source_index[i]
};
AdaptedSet box_adapter(const EuclideanPointSet& p, std::size_t dimension);

/// Thinning on a box with effective means lambda * volume, mu * volume.
/// Survivors are returned with their original coordinates, in input order.
EuclideanPointSet thin_box(const EuclideanPointSet& p, const BoxSpec& box, double lambda,
                           double mu);

struct TileResult {
  EuclideanPointSet points;  // cube-lexicographic order, input order inside a cube
  double tile_side = 0.0;
  std::vector<std::size_t> cells_per_axis;
  // Clipped boundary cells too small to admit a thinning; their points are
  // passed through unchanged. Indices are row-major, first axis slowest.
  std::vector<std::size_t> unthinned_cells;
};

/// Local thinning of a large box: cubes of volume 1/(lambda - mu) anchored
/// at the lower corner are thinned independently, each from effective mean
/// lambda/(lambda - mu) to mu/(lambda - mu). A point's fate depends only on
/// the points of its own cube.
TileResult tile_thin(const EuclideanPointSet& p, const BoxSpec& region, double lambda, double mu);

}  // namespace detthin
