#include "doctest.h"

#include <algorithm>

#include "detthin/circle.hpp"
#include "detthin/counter_hash.hpp"
#include "detthin/errors.hpp"
#include "detthin/stats.hpp"

using namespace detthin;

namespace {

constexpr u128 kHalf = static_cast<u128>(1) << 127;

CirclePointSet random_circle(const CounterStream& rng, std::size_t n) {
  std::vector<CirclePoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(CirclePoint{rng.word128(1, i)});
  return CirclePointSet(pts);
}

// Tries every station as a start and keeps those from which a full
// counterclockwise circuit never runs dry. Fuel 1/n per station, in units
// of 2^-128 / n.
std::vector<CirclePoint> feasible_starts(const CirclePointSet& s) {
  const std::size_t n = s.size();
  const Wide one = Wide(1) << 128;
  std::vector<CirclePoint> out;
  for (std::size_t start = 0; start < n; ++start) {
    Wide fuel = 0;
    bool ok = true;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = (start + step) % n, j = (i + 1) % n;
      Wide gap = Wide(s[j].turns) - Wide(s[i].turns);
      if (gap <= 0) gap += one;
      if (n == 1) gap = one;
      fuel += one - gap * n;
      if (fuel < 0) ok = false;
    }
    if (ok) out.push_back(s[start]);
  }
  return out;
}

}  // namespace

TEST_CASE("gas station") {
  const CirclePointSet single{CirclePoint{12345}};
  CHECK(gas_station(single) == CirclePoint{12345});
  const u128 q = static_cast<u128>(1) << 126;
  CHECK_FALSE(gas_station(CirclePointSet{CirclePoint{0}, CirclePoint{q}, CirclePoint{2 * q},
                                         CirclePoint{3 * q}})
                  .has_value());
  CHECK_FALSE(gas_station(CirclePointSet{CirclePoint{5}, CirclePoint{5 + kHalf}}).has_value());
  // 0, 0.1, 0.5 with fuel 1/3 each: starting at 0.5 runs dry on the half
  // turn back to 0, starting at 0.1 runs dry before 0.5; only 0 works.
  const CirclePointSet s{CirclePoint{0}, CirclePoint{UnitPoint::from_double(0.1).bits},
                         CirclePoint{kHalf}};
  const auto starts = feasible_starts(s);
  REQUIRE(starts.size() == 1);
  CHECK(gas_station(s) == starts[0]);
  CHECK(starts[0] == CirclePoint{0});
  CHECK_THROWS_AS(gas_station(CirclePointSet{}), DomainError);
  CHECK_THROWS_AS((CirclePointSet{CirclePoint{1}, CirclePoint{1}}), DomainError);
}

TEST_CASE("gas station agrees with exhaustive circuits") {
  for (std::uint64_t t = 0; t < 400; ++t) {
    const CirclePointSet s = random_circle(CounterStream(31, t), 1 + t % 9);
    const auto starts = feasible_starts(s);
    const auto z = gas_station(s);
    if (starts.size() == 1) {
      CHECK(z == starts[0]);
    } else {
      CHECK_FALSE(z.has_value());
    }
  }
}

TEST_CASE("arc set of new minima has mass 1/n") {
  const ArcUnion two = t_set(CirclePointSet{CirclePoint{77}});
  CHECK(two.measure_numerator() * 2 == two.denominator());
  for (std::uint32_t n = 2; n <= 10; ++n) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      const ArcUnion t = t_set(random_circle(CounterStream(41, n * 100 + rep), n - 1));
      CHECK(t.measure_numerator() * n == t.denominator());
      CHECK(std::abs(t.measure() - 1.0 / n) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(t_set(CirclePointSet{}), DomainError);
}

TEST_CASE("equally spaced points give congruent arcs") {
  const u128 q = static_cast<u128>(1) << 126;
  const ArcUnion t =
      t_set(CirclePointSet{CirclePoint{0}, CirclePoint{q}, CirclePoint{2 * q}, CirclePoint{3 * q}});
  const auto parts = t.components();
  REQUIRE(parts.size() == 4);
  for (const Arc& a : parts) CHECK(a.length * 20 == t.denominator());
  // Three equally spaced points cannot be represented exactly; the arcs
  // still come out congruent up to one grid unit.
  const u128 third = (~static_cast<u128>(0)) / 3;
  const ArcUnion t3 = t_set(CirclePointSet{CirclePoint{0}, CirclePoint{third}, CirclePoint{2 * third}});
  const auto p3 = t3.components();
  REQUIRE(p3.size() == 3);
  for (const Arc& a : p3) CHECK(abs(a.length * 12 - t3.denominator()) <= Wide(64) * 12);
}

TEST_CASE("new point wins the gas station exactly on the arc set") {
  for (std::uint32_t n = 2; n <= 6; ++n) {
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const CounterStream rng(43, n * 100 + rep);
      const CirclePointSet b = random_circle(rng, n - 1);
      const ArcUnion t = t_set(b);
      std::size_t inside = 0;
      for (std::uint64_t i = 0; i < 2000; ++i) {
        // Dense sweep with a per-cell jitter.
        const u128 cell = ~static_cast<u128>(0) / 2000;
        const u128 w = cell * i + rng.word128(2, i) % cell;
        std::vector<CirclePoint> pts(b.begin(), b.end());
        pts.push_back(CirclePoint{w});
        const auto z = gas_station(CirclePointSet(pts));
        CHECK((z == CirclePoint{w}) == t.contains(CirclePoint{w}));
        inside += t.contains(CirclePoint{w});
      }
      CHECK(std::abs(inside / 2000.0 - 1.0 / n) < 0.05);
    }
  }
}

TEST_CASE("circle deletion is rotation equivariant") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    const CounterStream rng(47, t);
    const CirclePointSet s = random_circle(rng, 1 + t % 10);
    const CircleDeletion d = circle_delete_one(s);
    for (std::uint64_t r = 0; r < 5; ++r) {
      const u128 theta = rng.word128(3, r);
      const CircleDeletion e = circle_delete_one(rotate(s, theta));
      CHECK(e.kept == rotate(d.kept, theta));
      CHECK(e.v == d.v);
      CHECK(e.degenerate == d.degenerate);
    }
    if (!d.degenerate) {
      CHECK(d.kept.size() + 1 == s.size());
      CHECK(d.kept.is_subset_of(s));
      CHECK(d.deleted == gas_station(s));
    }
  }
  CHECK(circle_delete_one(CirclePointSet{CirclePoint{9}}).v.bits == 0);
  const CircleDeletion tie = circle_delete_one(CirclePointSet{CirclePoint{3}, CirclePoint{3 + kHalf}});
  CHECK(tie.degenerate);
  CHECK(tie.v.bits == 0);
  CHECK(tie.kept.size() == 2);
  CHECK_THROWS_AS(circle_delete_one(CirclePointSet{}), DomainError);
}

TEST_CASE("circle deletion leaves uniforms and an independent uniform v") {
  constexpr std::size_t kTrials = 40000;
  std::vector<double> gaps, vs;
  std::vector<std::size_t> table(8 * 8, 0);
  for (std::size_t t = 0; t < kTrials; ++t) {
    const CircleDeletion d = circle_delete_one(random_circle(CounterStream(53, t), 3));
    REQUIRE_FALSE(d.degenerate);
    // Distance between the two survivors along the circle's parameter: the
    // spacing of two uniforms, with cdf 1 - (1-x)^2.
    const u128 gap = d.kept[1].turns - d.kept[0].turns;
    gaps.push_back(UnitPoint{gap}.to_double());
    vs.push_back(d.v.to_double());
    ++table[static_cast<std::size_t>(d.v.to_double() * 8) * 8 +
            static_cast<std::size_t>(UnitPoint{d.kept[0].turns}.to_double() * 8)];
  }
  CHECK(ks_test(gaps, [](double x) { return 1.0 - (1.0 - x) * (1.0 - x); }).p_value > 0.01);
  CHECK(ks_test(vs, [](double x) { return x; }).p_value > 0.01);
  CHECK(chi_square_independence(table, 8, 8).p_value > 0.01);
}

TEST_CASE("rotation and ordering helpers") {
  const CirclePointSet s{CirclePoint{10}, CirclePoint{kHalf}, CirclePoint{~static_cast<u128>(0)}};
  const CirclePointSet r = rotate(s, 1);
  CHECK(r.contains(CirclePoint{0}));
  CHECK(r.contains(CirclePoint{11}));
  const auto order = ccw_order_from(s, CirclePoint{kHalf});
  REQUIRE(order.size() == 2);
  CHECK(order[0] == CirclePoint{~static_cast<u128>(0)});
  CHECK(order[1] == CirclePoint{10});
}
