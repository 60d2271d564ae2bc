#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "detthin/fraction.hpp"

namespace detthin {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: every output is a pure function of
/// (key, lane, counter), so streams can be split per trial and per point
/// without any sequencing between them.
///
/// word(lane, c) = mix64(key ^ mix64(lane * 2^40 + c)) with
/// key = mix64(seed ^ mix64(stream)).
class CounterStream {
 public:
  constexpr CounterStream(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream ^ 0x5851f42d4c957f2dULL))) {}

  constexpr std::uint64_t word(std::uint64_t lane, std::uint64_t counter) const {
    return mix64(key_ ^ mix64((lane << 40) + counter));
  }

  constexpr u128 word128(std::uint64_t lane, std::uint64_t counter) const {
    return (static_cast<u128>(word(lane, 2 * counter)) << 64) | word(lane, 2 * counter + 1);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform(std::uint64_t lane, std::uint64_t counter) const {
    return static_cast<double>(word(lane, counter) >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

/// Deterministic pseudo-random ordering of {0, ..., m-1} keyed by `key`:
/// a Fisher-Yates shuffle fed by the counter stream (key, 0). Used to turn
/// a short uniform into a uniformly random ordering of points.
inline std::vector<std::size_t> keyed_order(std::size_t m, std::uint64_t key) {
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const CounterStream stream(key, 0x6b65796564ULL);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const auto span = static_cast<std::uint64_t>(m - i);
    // Lemire multiply-shift; bias <= m / 2^64.
    const auto r = static_cast<std::uint64_t>(
        (static_cast<u128>(stream.word(0, i)) * span) >> 64);
    std::swap(order[i], order[i + static_cast<std::size_t>(r)]);
  }
  return order;
}

}  // namespace detthin
