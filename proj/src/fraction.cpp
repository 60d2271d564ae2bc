#include "detthin/fraction.hpp"

#include <algorithm>
#include <cmath>

#include "detthin/errors.hpp"

namespace detthin {

double UnitPoint::to_double() const {
  const double x = std::ldexp(static_cast<double>(static_cast<std::uint64_t>(bits >> 64)), -64);
  return x < 1.0 ? x : std::nextafter(1.0, 0.0);
}

UnitPoint UnitPoint::from_double(double x) {
  if (!(x >= 0.0 && x < 1.0)) {
    throw DomainError("unit point must lie in [0,1)");
  }
  const auto hi = static_cast<std::uint64_t>(std::ldexp(x, 64));
  return UnitPoint{static_cast<u128>(hi) << 64};
}

double Fraction48::to_double() const {
  return std::ldexp(static_cast<double>(bits & kMask48), -48);
}

std::string to_hex(u128 value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "0x";
  out.resize(34);
  for (int i = 33; i >= 2; --i) {
    out[i] = kDigits[static_cast<unsigned>(value & 0xf)];
    value >>= 4;
  }
  return out;
}

u128 parse_hex128(std::string_view text) {
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty() || text.size() > 32) {
    throw DomainError("hex fraction must have 1 to 32 digits");
  }
  u128 value = 0;
  for (char c : text) {
    unsigned digit;
    if (c >= '0' && c <= '9') {
      digit = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      digit = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      digit = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw DomainError("invalid hex digit in fraction");
    }
    value = (value << 4) | digit;
  }
  // Short literals are left-aligned: "0x8" is one half.
  if (text.size() < 32) value <<= 4 * (32 - text.size());
  return value;
}

PointSet::PointSet(std::vector<UnitPoint> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  if (std::adjacent_find(points_.begin(), points_.end()) != points_.end()) {
    throw DomainError("point set contains duplicate points");
  }
}

PointSet::PointSet(std::initializer_list<UnitPoint> points)
    : PointSet(std::vector<UnitPoint>(points)) {}

bool PointSet::contains(UnitPoint p) const {
  return std::binary_search(points_.begin(), points_.end(), p);
}

bool PointSet::is_subset_of(const PointSet& other) const {
  return std::includes(other.points_.begin(), other.points_.end(), points_.begin(),
                       points_.end());
}

}  // namespace detthin
