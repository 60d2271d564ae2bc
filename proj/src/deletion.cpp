#include "detthin/deletion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detthin/counter_hash.hpp"
#include "detthin/errors.hpp"

namespace detthin {
namespace {

// Number of 32-bit prefixes congruent to r mod n.
std::uint64_t residue_count(std::uint32_t r, std::uint32_t n) {
  constexpr std::uint64_t kPrefixes = std::uint64_t{1} << 32;
  return kPrefixes / n + (r < kPrefixes % n ? 1 : 0);
}

std::uint32_t compact_bits(std::uint64_t v) {
  std::uint32_t out = 0;
  for (int i = 0; i < 24; ++i) out |= static_cast<std::uint32_t>((v >> (2 * i)) & 1u) << i;
  return out;
}

}  // namespace

TripleCode encode_split(UnitPoint p, std::uint32_t n) {
  if (n == 0) throw DomainError("encode_split needs n >= 1");
  const auto top = static_cast<std::uint32_t>(p.bits >> 96);
  return TripleCode{1 + top % n,
                    Fraction48{static_cast<std::uint64_t>(p.bits >> 48) & kMask48},
                    Fraction48{static_cast<std::uint64_t>(p.bits) & kMask48}};
}

DeletionTrace delete_one(const PointSet& s) {
  if (s.empty()) throw DomainError("cannot delete from an empty point set");
  const auto n = static_cast<std::uint32_t>(s.size());

  std::vector<TripleCode> codes;
  codes.reserve(n);
  std::uint64_t label_sum = 0;
  for (const UnitPoint& p : s) {
    codes.push_back(encode_split(p, n));
    label_sum += codes.back().x;
  }
  const auto residue = static_cast<std::uint32_t>(label_sum % n);
  const std::uint32_t k_index = residue == 0 ? n : residue;

  // Points are already sorted, so index order breaks y ties by point order.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto by_y = [&](std::uint32_t a, std::uint32_t b) {
    return codes[a].y.bits != codes[b].y.bits ? codes[a].y.bits < codes[b].y.bits : a < b;
  };
  std::nth_element(order.begin(), order.begin() + (k_index - 1), order.end(), by_y);
  const std::uint32_t victim = order[k_index - 1];

  std::vector<UnitPoint> kept;
  kept.reserve(n - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (i != victim) kept.push_back(s[i]);
  }
  return DeletionTrace{PointSet(std::move(kept)), s[victim], k_index, codes[victim].z};
}

MeasureEstimate r_set_measure(const PointSet& b, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("r_set_measure needs at least one sample");
  const auto n = static_cast<std::uint32_t>(b.size() + 1);
  if (n == 1) return {1.0, 0.0, samples};

  // One representative 32-bit prefix per residue class, with its weight.
  std::vector<double> weight(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    weight[r] = std::ldexp(static_cast<double>(residue_count(r, n)), -32);
  }

  const CounterStream jitter(seed, 0x72736574ULL ^ b.size());
  const double strata = static_cast<double>(samples);
  double hits = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = (static_cast<double>(i) + jitter.uniform(0, i)) / strata;
    const auto y = static_cast<std::uint64_t>(std::ldexp(u, 48)) & kMask48;
    const std::uint64_t z = jitter.word(1, i) & kMask48;
    for (std::uint32_t r = 0; r < n; ++r) {
      const u128 bits = (static_cast<u128>(r) << 96) | (static_cast<u128>(y) << 48) | z;
      const UnitPoint w{bits};
      if (b.contains(w)) continue;
      std::vector<UnitPoint> joined(b.begin(), b.end());
      joined.push_back(w);
      if (delete_one(PointSet(std::move(joined))).deleted == w) hits += weight[r];
    }
  }
  const double estimate = hits / strata;
  const double se = std::sqrt(std::max(estimate * (1.0 - estimate), 0.0) / strata);
  return {estimate, se, samples};
}

std::pair<std::uint32_t, std::uint32_t> split_even_odd(Fraction48 v) {
  return {compact_bits(v.bits & kMask48), compact_bits((v.bits & kMask48) >> 1)};
}

PointSet delete_to_count(const PointSet& s, const DiscreteLaw& law) {
  if (s.empty()) throw DomainError("cannot delete from an empty point set");
  if (law.size() > 0 && law.support_max() >= s.size()) {
    throw DomainError("count law puts mass on a count >= the number of points");
  }
  const DeletionTrace trace = delete_one(s);
  const auto [count_bits, order_bits] = split_even_odd(trace.v);
  const std::size_t count = law.quantile(std::ldexp(static_cast<double>(count_bits), -24));

  const auto order = keyed_order(trace.kept.size(), order_bits);
  std::vector<UnitPoint> chosen;
  chosen.reserve(count);
  for (std::size_t i = 0; i < count; ++i) chosen.push_back(trace.kept[order[i]]);
  return PointSet(std::move(chosen));
}

}  // namespace detthin
