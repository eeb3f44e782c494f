#pragma once

#include <stdexcept>
#include <string>

namespace parisi {

/// Input rejected by a constructor or a precondition check.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside [0,1] where a formula is only defined on the unit interval.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quadrature error estimate exceeded the caller's ceiling.
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// A perturbation of an atom leaves the set of admissible measures in both directions.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parisi
