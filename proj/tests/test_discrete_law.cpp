#include "doctest.h"

#include "detthin/discrete_law.hpp"
#include "detthin/errors.hpp"

using namespace detthin;

TEST_CASE("cumulative sums and quantiles") {
  const DiscreteLaw law({0.2, 0.0, 0.5, 0.3});
  CHECK(law.size() == 4);
  CHECK(law.cdf(0) == doctest::Approx(0.2));
  CHECK(law.cdf(1) == doctest::Approx(0.2));
  CHECK(law.cdf(2) == doctest::Approx(0.7));
  CHECK(law.cdf(9) == doctest::Approx(1.0));
  CHECK(law.mass(7) == 0.0);
  CHECK(law.support_max() == 3);
  CHECK(law.quantile(0.0) == 0);
  CHECK(law.quantile(0.1999) == 0);
  CHECK(law.quantile(0.2) == 2);  // zero-mass atom is never chosen
  CHECK(law.quantile(0.69) == 2);
  CHECK(law.quantile(0.7) == 3);
  CHECK(law.quantile(0.999999) == 3);
}

TEST_CASE("point mass and trailing zeros") {
  const DiscreteLaw p = DiscreteLaw::point_mass(3);
  CHECK(p.mass(3) == 1.0);
  CHECK(p.quantile(0.0) == 3);
  CHECK(p.quantile(0.99) == 3);
  const DiscreteLaw z({0.5, 0.5, 0.0, 0.0});
  CHECK(z.support_max() == 1);
  CHECK(z.quantile(0.9999) == 1);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(DiscreteLaw({0.5, -0.1, 0.6}), DomainError);
  CHECK_THROWS_AS(DiscreteLaw({0.7, 0.7}), DomainError);
  const DiscreteLaw t({0.4, 0.6}, TailCut{1, 1e-13});
  CHECK(t.tail().index == 1);
  CHECK(t.tail().folded_mass == 1e-13);
}
