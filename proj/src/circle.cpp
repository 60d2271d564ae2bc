#include "detthin/circle.hpp"

#include <algorithm>

#include "detthin/errors.hpp"

namespace detthin {
namespace {

const Wide kTurn = Wide(1) << 128;

Wide wide(u128 v) {
  Wide w = static_cast<std::uint64_t>(v >> 64);
  w <<= 64;
  w += static_cast<std::uint64_t>(v);
  return w;
}

Wide mod(const Wide& a, const Wide& m) {
  Wide r = a % m;
  if (r < 0) r += m;
  return r;
}

}  // namespace

CirclePointSet::CirclePointSet(std::vector<CirclePoint> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  if (std::adjacent_find(points_.begin(), points_.end()) != points_.end()) {
    throw DomainError("circle point set contains duplicate points");
  }
}

CirclePointSet::CirclePointSet(std::initializer_list<CirclePoint> points)
    : CirclePointSet(std::vector<CirclePoint>(points)) {}

bool CirclePointSet::contains(CirclePoint p) const {
  return std::binary_search(points_.begin(), points_.end(), p);
}

bool CirclePointSet::is_subset_of(const CirclePointSet& other) const {
  return std::includes(other.points_.begin(), other.points_.end(), points_.begin(),
                       points_.end());
}

CirclePoint rotate(CirclePoint p, u128 theta) { return CirclePoint{p.turns + theta}; }

CirclePointSet rotate(const CirclePointSet& s, u128 theta) {
  std::vector<CirclePoint> out;
  out.reserve(s.size());
  for (CirclePoint p : s) out.push_back(rotate(p, theta));
  return CirclePointSet(std::move(out));
}

std::vector<CirclePoint> ccw_order_from(const CirclePointSet& s, CirclePoint origin) {
  std::vector<CirclePoint> out;
  out.reserve(s.size());
  for (CirclePoint p : s) {
    if (p != origin) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [origin](CirclePoint a, CirclePoint b) {
    return static_cast<u128>(a.turns - origin.turns) < static_cast<u128>(b.turns - origin.turns);
  });
  return out;
}

std::optional<CirclePoint> gas_station(const CirclePointSet& s) {
  if (s.empty()) throw DomainError("gas station needs at least one point");
  const std::size_t n = s.size();
  if (n == 1) return s[0];

  // Fuel on arrival at station i, starting empty at station 0, scaled by
  // n * 2^128: i * 2^128 - n * (p_i - p_0).
  const Wide base = wide(s[0].turns);
  Wide best;
  std::size_t best_index = 0;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Wide fuel = Wide(i) * kTurn - Wide(n) * (wide(s[i].turns) - base);
    if (i == 0 || fuel < best) {
      best = fuel;
      best_index = i;
      ties = 1;
    } else if (fuel == best) {
      ++ties;
    }
  }
  if (ties > 1) return std::nullopt;
  return s[best_index];
}

ArcUnion::ArcUnion(std::uint32_t n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {
  if (n_ == 0) throw DomainError("arc union needs a positive denominator scale");
}

Wide ArcUnion::denominator() const { return Wide(n_) * kTurn; }

Wide ArcUnion::measure_numerator() const {
  Wide total = 0;
  for (const Arc& a : arcs_) total += a.length;
  return total;
}

double ArcUnion::measure() const {
  return measure_numerator().convert_to<double>() / denominator().convert_to<double>();
}

bool ArcUnion::contains(CirclePoint p) const {
  const Wide d = denominator();
  const Wide x = wide(p.turns) * n_;
  return std::any_of(arcs_.begin(), arcs_.end(),
                     [&](const Arc& a) { return mod(x - a.start, d) < a.length; });
}

std::vector<Arc> ArcUnion::components() const {
  if (arcs_.empty()) return {};
  const Wide d = denominator();
  std::vector<Arc> sorted = arcs_;
  std::sort(sorted.begin(), sorted.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
  const std::size_t m = sorted.size();
  auto touches_previous = [&](std::size_t i) {
    const Arc& prev = sorted[(i + m - 1) % m];
    return mod(prev.start + prev.length, d) == sorted[i].start;
  };
  std::size_t first = m;
  for (std::size_t i = 0; i < m; ++i) {
    if (!touches_previous(i)) {
      first = i;
      break;
    }
  }
  if (first == m) return {Arc{0, d}};  // whole circle

  std::vector<Arc> out;
  for (std::size_t step = 0; step < m; ++step) {
    const std::size_t i = (first + step) % m;
    if (step > 0 && touches_previous(i)) {
      out.back().length += sorted[i].length;
    } else {
      out.push_back(sorted[i]);
    }
  }
  return out;
}

ArcUnion t_set(const CirclePointSet& b) {
  if (b.empty()) throw DomainError("t_set needs at least one point");
  const std::size_t m = b.size();
  const auto n = static_cast<std::uint32_t>(m + 1);
  const Wide d = Wide(n) * kTurn;

  std::vector<Arc> arcs;
  for (std::size_t g = 0; g < m; ++g) {
    // x in the gap after b[g] reaches the j-th following point c_j with
    // fuel (j+1)/n - (c_j - x); all must be nonnegative.
    Wide lower;
    Wide gap_end;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t idx = g + 1 + j;
      Wide c = wide(b[idx % m].turns);
      if (idx >= m) c += kTurn;
      const Wide bound = c * n - Wide(j + 1) * kTurn;
      if (j == 0) {
        lower = bound;
        gap_end = c * n;
      } else {
        lower = std::max(lower, bound);
      }
    }
    const Wide start = std::max(lower, wide(b[g].turns) * n);
    if (start < gap_end) arcs.push_back(Arc{mod(start, d), gap_end - start});
  }
  return ArcUnion(n, std::move(arcs));
}

CircleDeletion circle_delete_one(const CirclePointSet& s) {
  if (s.empty()) throw DomainError("cannot delete from an empty circle point set");
  const auto z = gas_station(s);
  if (!z) return CircleDeletion{s, Fraction48{0}, true, std::nullopt};

  std::vector<CirclePoint> rest;
  rest.reserve(s.size() - 1);
  for (CirclePoint p : s) {
    if (p != *z) rest.push_back(p);
  }
  CirclePointSet kept(std::move(rest));
  if (kept.empty()) return CircleDeletion{std::move(kept), Fraction48{0}, false, z};

  const ArcUnion t = t_set(kept);
  const Wide d = t.denominator();
  const Wide x = wide(z->turns) * t.denominator_scale();
  for (const Arc& c : t.components()) {
    const Wide offset = mod(x - c.start, d);
    if (offset < c.length) {
      const Wide scaled = (offset << 48) / c.length;
      return CircleDeletion{std::move(kept), Fraction48{scaled.convert_to<std::uint64_t>()},
                            false, z};
    }
  }
  throw ConsistencyError("gas station not found in the arc set of the remaining points");
}

}  // namespace detthin
