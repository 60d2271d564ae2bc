#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace detthin {

using u128 = unsigned __int128;

inline constexpr std::uint64_t kMask48 = (std::uint64_t{1} << 48) - 1;

/// Point of [0,1) held as an exact binary fraction integer / 2^128.
struct UnitPoint {
  u128 bits = 0;

  friend constexpr bool operator==(const UnitPoint&, const UnitPoint&) = default;
  friend constexpr std::strong_ordering operator<=>(const UnitPoint& a, const UnitPoint& b) {
    return a.bits < b.bits ? std::strong_ordering::less
           : a.bits == b.bits ? std::strong_ordering::equal
                              : std::strong_ordering::greater;
  }

  /// Rounds the leading 64 bits to nearest, clamped below 1.
  double to_double() const;
  /// x must lie in [0,1); bits beyond double precision are zero.
  static UnitPoint from_double(double x);
};

/// 48-bit binary fraction, value = bits / 2^48.
struct Fraction48 {
  std::uint64_t bits = 0;

  friend constexpr bool operator==(const Fraction48&, const Fraction48&) = default;
  double to_double() const;
};

// "0x" followed by exactly 32 hex digits.
std::string to_hex(u128 value);
u128 parse_hex128(std::string_view text);

/// Strictly increasing sequence of distinct unit points: the support of a
/// simple point measure on [0,1).
class PointSet {
 public:
  PointSet() = default;
  // Sorts; throws DomainError on duplicates.
  explicit PointSet(std::vector<UnitPoint> points);
  PointSet(std::initializer_list<UnitPoint> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::span<const UnitPoint> points() const { return points_; }
  const UnitPoint& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  bool contains(UnitPoint p) const;
  bool is_subset_of(const PointSet& other) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::vector<UnitPoint> points_;
};

}  // namespace detthin
