#pragma once

#include <iosfwd>

#include "detthin/poisson_math.hpp"

namespace detthin {

// One row per cell with lambda > mu > 0: lambda,mu,feasible,k where k is
// the witness when feasible and the blocking index otherwise.
// Returns the number of data rows.
std::size_t write_region_csv(std::ostream& out, const RegionGrid& grid);

// Feasible cells shaded, boundary curves as polylines (shifted-cdf family
// red, pmf family blue), the diagonal mu = lambda, lambda to the right and
// mu upward.
void write_region_svg(std::ostream& out, const RegionGrid& grid);

}  // namespace detthin
