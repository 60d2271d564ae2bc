#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace detthin {

/// Where a law was truncated and how much tail mass was folded into the
/// last kept atom.
struct TailCut {
  std::size_t index = 0;
  double folded_mass = 0.0;
};

/// Finite probability vector indexed from 0.
class DiscreteLaw {
 public:
  DiscreteLaw() = default;
  // Throws DomainError on negative masses or total above 1 + 1e-12.
  explicit DiscreteLaw(std::vector<double> masses, TailCut tail = {});

  static DiscreteLaw point_mass(std::size_t j);

  std::span<const double> masses() const { return masses_; }
  std::size_t size() const { return masses_.size(); }
  double mass(std::size_t j) const { return j < masses_.size() ? masses_[j] : 0.0; }
  double cdf(std::size_t j) const;
  double total() const;
  const TailCut& tail() const { return tail_; }

  // Largest index with positive mass; 0 for an all-zero law.
  std::size_t support_max() const;

  /// Smallest j with cdf(j) > u, clamped to the support for u at or above
  /// the total.
  std::size_t quantile(double u) const;

 private:
  std::vector<double> masses_;
  std::vector<double> cumulative_;
  TailCut tail_;
};

}  // namespace detthin
