#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "detthin/circle.hpp"
#include "detthin/thinning.hpp"

namespace detthin {

/// Text point file.
///
///   dim=2 box=0..1,0..3      or      circle
///   0x<32 hex digits>,0x<32 hex digits> # 0.25 1.5
///
/// Each hex field is the box-relative (or, on the circle, turn) fraction
/// and is authoritative; the decimals after '#' are informational. Blank
/// lines and lines starting with '#' are ignored.
struct PointFile {
  bool circle = false;
  BoxSpec box;                  // unused for the circle
  std::vector<BoxPoint> points;  // one fraction per axis; a single turn on the circle

  std::size_t dimension() const { return circle ? 1 : box.dimension(); }
};

// Throws PreconditionError on malformed input, DomainError for points on
// the box boundary.
PointFile parse_point_file(std::istream& in);
PointFile read_point_file(const std::string& path);
void write_point_file(std::ostream& out, const PointFile& file);

std::string format_double(double x);

}  // namespace detthin
