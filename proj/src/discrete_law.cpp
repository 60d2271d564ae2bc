#include "detthin/discrete_law.hpp"

#include <algorithm>
#include <cmath>

#include "detthin/errors.hpp"

namespace detthin {

DiscreteLaw::DiscreteLaw(std::vector<double> masses, TailCut tail)
    : masses_(std::move(masses)), tail_(tail) {
  cumulative_.reserve(masses_.size());
  double running = 0.0;
  for (double m : masses_) {
    if (!std::isfinite(m) || m < 0.0) throw DomainError("law masses must be nonnegative");
    running += m;
    cumulative_.push_back(running);
  }
  if (running > 1.0 + 1e-12) throw DomainError("law masses sum above one");
}

DiscreteLaw DiscreteLaw::point_mass(std::size_t j) {
  std::vector<double> masses(j + 1, 0.0);
  masses[j] = 1.0;
  return DiscreteLaw(std::move(masses));
}

double DiscreteLaw::cdf(std::size_t j) const {
  if (cumulative_.empty()) return 0.0;
  return cumulative_[std::min(j, cumulative_.size() - 1)];
}

double DiscreteLaw::total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

std::size_t DiscreteLaw::support_max() const {
  for (std::size_t j = masses_.size(); j > 0; --j) {
    if (masses_[j - 1] > 0.0) return j - 1;
  }
  return 0;
}

std::size_t DiscreteLaw::quantile(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return support_max();
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace detthin
