#include "detthin/thinning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "detthin/counter_hash.hpp"
#include "detthin/deletion.hpp"
#include "detthin/errors.hpp"

namespace detthin {
namespace {

FeasibilityWitness require_feasible(double lambda_eff, double mu_eff) {
  const FeasibilityWitness w = feasible_ii({lambda_eff, mu_eff, 1.0});
  if (!w.feasible) {
    std::ostringstream msg;
    msg << "no deterministic thinning from mean " << lambda_eff << " to mean " << mu_eff
        << " (blocking k = " << *w.blocking_k << ")";
    throw FeasibilityError(msg.str(), *w.blocking_k);
  }
  return w;
}

void check_intensities(double lambda, double mu) {
  IntensityPair{lambda, mu, 1.0}.validate_for_thinning();
}

// Survivor indices (into p) of one thinning pass over box-relative points.
std::vector<std::size_t> surviving_indices(const PoissonThinning& thinning,
                                           const std::vector<BoxPoint>& points,
                                           std::size_t dimension) {
  EuclideanPointSet view{points};
  const AdaptedSet adapted = box_adapter(view, dimension);
  const PointSet survivors = thinning.apply(adapted.unit);
  std::vector<std::size_t> out;
  out.reserve(survivors.size());
  const auto unit = adapted.unit.points();
  for (const UnitPoint& s : survivors) {
    const auto it = std::lower_bound(unit.begin(), unit.end(), s);
    out.push_back(adapted.source_index[static_cast<std::size_t>(it - unit.begin())]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Position of a region-relative fraction inside its tile along one axis.
// The leading 64 bits are recomputed in extended precision; the trailing
// 64 bits are carried over unchanged.
struct TileCoordinate {
  std::size_t cell;
  UnitPoint relative;
};

TileCoordinate locate_in_tile(UnitPoint f, double extent, double side, std::size_t cells) {
  const long double head = std::ldexp(static_cast<long double>(static_cast<std::uint64_t>(f.bits >> 64)), -64);
  const long double pos = head * static_cast<long double>(extent);
  auto cell = static_cast<std::size_t>(std::floor(pos / static_cast<long double>(side)));
  cell = std::min(cell, cells - 1);
  const long double start = static_cast<long double>(cell) * side;
  const long double width = std::min<long double>(side, static_cast<long double>(extent) - start);
  long double rel = (pos - start) / width;
  rel = std::clamp(rel, 0.0L, 1.0L);
  const long double scaled = std::ldexp(rel, 64);
  const std::uint64_t hi = scaled >= 0x1.0p64L ? ~std::uint64_t{0}
                                                : static_cast<std::uint64_t>(scaled);
  const u128 bits = (static_cast<u128>(hi) << 64) | static_cast<std::uint64_t>(f.bits);
  return {cell, UnitPoint{bits}};
}

}  // namespace

PoissonThinning::PoissonThinning(double lambda_eff, double mu_eff) {
  check_intensities(lambda_eff, mu_eff);
  const FeasibilityWitness w = require_feasible(lambda_eff, mu_eff);
  plan_ = build_plan(lambda_eff, mu_eff, *w.k);
  const std::size_t cached = plan_.x_cdf.size() + 1;
  cached_laws_.reserve(cached);
  for (std::size_t n = 0; n < cached; ++n) cached_laws_.push_back(conditional_law(plan_, n));
}

DiscreteLaw PoissonThinning::count_law(std::size_t n) const {
  if (n < cached_laws_.size()) return cached_laws_[n];
  return conditional_law(plan_, n);
}

PointSet PoissonThinning::apply(const PointSet& s) const {
  if (s.size() <= plan_.k) return s;
  if (s.size() < cached_laws_.size()) return delete_to_count(s, cached_laws_[s.size()]);
  return delete_to_count(s, conditional_law(plan_, s.size()));
}

PoissonThinning::CircleResult PoissonThinning::apply(const CirclePointSet& s) const {
  if (s.size() <= plan_.k) return {s, false};
  const CircleDeletion deletion = circle_delete_one(s);
  if (deletion.degenerate) return {s, true};

  const DiscreteLaw law = count_law(s.size());
  const auto [count_bits, order_bits] = split_even_odd(deletion.v);
  const std::size_t count = law.quantile(std::ldexp(static_cast<double>(count_bits), -24));
  const std::vector<CirclePoint> ring = ccw_order_from(deletion.kept, *deletion.deleted);
  const auto order = keyed_order(ring.size(), order_bits);
  std::vector<CirclePoint> chosen;
  chosen.reserve(count);
  for (std::size_t i = 0; i < count; ++i) chosen.push_back(ring[order[i]]);
  return {CirclePointSet(std::move(chosen)), false};
}

PointSet thin_unit(const PointSet& s, double lambda, double mu) {
  return PoissonThinning(lambda, mu).apply(s);
}

PoissonThinning::CircleResult thin_circle(const CirclePointSet& s, double lambda, double mu) {
  return PoissonThinning(lambda, mu).apply(s);
}

BoxSpec::BoxSpec(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw DomainError("box bounds must have matching positive dimension");
  }
  if (lower.size() > 128) throw DomainError("box dimension above 128 is not supported");
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(lower[a] < upper[a])) {
      throw DomainError("box needs finite bounds with lower < upper");
    }
  }
}

BoxSpec BoxSpec::unit(std::size_t dimension) {
  return BoxSpec(std::vector<double>(dimension, 0.0), std::vector<double>(dimension, 1.0));
}

double BoxSpec::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dimension(); ++a) v *= extent(a);
  return v;
}

double BoxSpec::coordinate(UnitPoint fraction, std::size_t axis) const {
  return lower[axis] + fraction.to_double() * extent(axis);
}

UnitPoint BoxSpec::fraction_of(double x, std::size_t axis) const {
  if (!(x > lower[axis] && x < upper[axis])) {
    throw DomainError("point lies on or outside the box boundary");
  }
  double f = (x - lower[axis]) / extent(axis);
  if (f >= 1.0) f = std::nextafter(1.0, 0.0);
  return UnitPoint::from_double(f);
}

UnitPoint box_to_unit(const BoxPoint& p) {
  const std::size_t d = p.size();
  if (d == 0) throw DomainError("box point without coordinates");
  if (d == 1) return p[0];
  const std::size_t per_axis = 128 / d;
  u128 out = 0;
  for (std::size_t level = 0; level < per_axis; ++level) {
    for (std::size_t axis = 0; axis < d; ++axis) {
      const u128 bit = (p[axis].bits >> (127 - level)) & 1u;
      out |= bit << (127 - (level * d + axis));
    }
  }
  return UnitPoint{out};
}

BoxPoint unit_to_box(UnitPoint u, std::size_t dimension) {
  if (dimension == 0) throw DomainError("dimension must be positive");
  if (dimension == 1) return {u};
  const std::size_t per_axis = 128 / dimension;
  BoxPoint out(dimension);
  for (std::size_t level = 0; level < per_axis; ++level) {
    for (std::size_t axis = 0; axis < dimension; ++axis) {
      const u128 bit = (u.bits >> (127 - (level * dimension + axis))) & 1u;
      out[axis].bits |= bit << (127 - level);
    }
  }
  return out;
}

AdaptedSet box_adapter(const EuclideanPointSet& p, std::size_t dimension) {
  std::vector<std::pair<UnitPoint, std::size_t>> mapped;
  mapped.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.points[i].size() != dimension) throw DomainError("point dimension mismatch");
    mapped.emplace_back(box_to_unit(p.points[i]), i);
  }
  std::sort(mapped.begin(), mapped.end());
  AdaptedSet out;
  std::vector<UnitPoint> unit;
  unit.reserve(mapped.size());
  out.source_index.reserve(mapped.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    if (i > 0 && mapped[i].first == mapped[i - 1].first) {
      throw DomainError("distinct points collide under the box adapter");
    }
    unit.push_back(mapped[i].first);
    out.source_index.push_back(mapped[i].second);
  }
  out.unit = PointSet(std::move(unit));
  return out;
}

EuclideanPointSet thin_box(const EuclideanPointSet& p, const BoxSpec& box, double lambda,
                           double mu) {
  check_intensities(lambda, mu);
  const double vol = box.volume();
  const PoissonThinning thinning(lambda * vol, mu * vol);
  EuclideanPointSet out;
  for (std::size_t i : surviving_indices(thinning, p.points, box.dimension())) {
    out.points.push_back(p.points[i]);
  }
  return out;
}

TileResult tile_thin(const EuclideanPointSet& p, const BoxSpec& region, double lambda,
                     double mu) {
  check_intensities(lambda, mu);
  const std::size_t d = region.dimension();
  TileResult result;
  result.tile_side = std::pow(1.0 / (lambda - mu), 1.0 / static_cast<double>(d));
  result.cells_per_axis.resize(d);
  std::size_t total_cells = 1;
  for (std::size_t a = 0; a < d; ++a) {
    const double ratio = region.extent(a) / result.tile_side;
    result.cells_per_axis[a] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio - 1e-12)));
    total_cells *= result.cells_per_axis[a];
  }

  struct Member {
    std::size_t source;
    BoxPoint relative;
  };
  std::map<std::size_t, std::vector<Member>> by_cell;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.points[i].size() != d) throw DomainError("point dimension mismatch");
    std::size_t flat = 0;
    BoxPoint rel(d);
    for (std::size_t a = 0; a < d; ++a) {
      const TileCoordinate c = locate_in_tile(p.points[i][a], region.extent(a), result.tile_side,
                                              result.cells_per_axis[a]);
      flat = flat * result.cells_per_axis[a] + c.cell;
      rel[a] = c.relative;
    }
    by_cell[flat].push_back({i, std::move(rel)});
  }

  auto cell_volume = [&](std::size_t flat, bool& full) {
    double vol = 1.0;
    full = true;
    for (std::size_t a = d; a-- > 0;) {
      const std::size_t idx = flat % result.cells_per_axis[a];
      flat /= result.cells_per_axis[a];
      const double start = static_cast<double>(idx) * result.tile_side;
      double width = std::min(result.tile_side, region.extent(a) - start);
      if (width < result.tile_side * (1.0 - 1e-12)) {
        full = false;
      } else {
        width = result.tile_side;
      }
      vol *= width;
    }
    return vol;
  };

  std::unique_ptr<PoissonThinning> full_cube;
  for (std::size_t flat = 0; flat < total_cells; ++flat) {
    bool full = true;
    const double vol = cell_volume(flat, full);
    const auto members = by_cell.find(flat);
    const bool occupied = members != by_cell.end();

    std::unique_ptr<PoissonThinning> partial;
    const PoissonThinning* thinning = nullptr;
    if (full) {
      if (!full_cube) full_cube = std::make_unique<PoissonThinning>(lambda * vol, mu * vol);
      thinning = full_cube.get();
    } else if (is_feasible(lambda * vol, mu * vol)) {
      if (occupied) partial = std::make_unique<PoissonThinning>(lambda * vol, mu * vol);
      thinning = partial.get();
    } else {
      result.unthinned_cells.push_back(flat);
    }
    if (!occupied) continue;

    const std::vector<Member>& cell = members->second;
    if (!thinning) {
      for (const Member& m : cell) result.points.points.push_back(p.points[m.source]);
      continue;
    }
    std::vector<BoxPoint> relative;
    relative.reserve(cell.size());
    for (const Member& m : cell) relative.push_back(m.relative);
    for (std::size_t i : surviving_indices(*thinning, relative, d)) {
      result.points.points.push_back(p.points[cell[i].source]);
    }
  }
  return result;
}

}  // namespace detthin
