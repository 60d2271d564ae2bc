#pragma once

#include <stdexcept>
#include <string>

namespace detthin {

// Argument outside the mathematical domain of an operation (non-positive
// intensity, lambda <= mu, empty point set, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller-side precondition that is not a plain domain check, e.g. building
// a coupling plan with a k that does not witness feasibility.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// No deterministic thinning exists for the requested pair. Carries the k
// that violates the blocking condition.
class FeasibilityError : public std::runtime_error {
 public:
  FeasibilityError(const std::string& what, unsigned blocking_k)
      : std::runtime_error(what), blocking_k_(blocking_k) {}

  unsigned blocking_k() const noexcept { return blocking_k_; }

 private:
  unsigned blocking_k_;
};

// Quadrature or root finding failed to reach the requested accuracy.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant that the mathematics guarantees was violated.
// Always indicates a bug.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace detthin
