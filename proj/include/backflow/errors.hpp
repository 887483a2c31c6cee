#pragma once

#include <stdexcept>
#include <string>

namespace backflow {

/// Input outside the mathematical domain of an operation (non-finite
/// arguments, negative times, non-integrable exponents).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A result that cannot be represented in double precision.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// A well-formed request the closed forms do not cover, e.g. a
/// position-space amplitude with g != 0.
class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature gave up before reaching the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// A non-finite value surfaced while evaluating a curve or a grid.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace backflow
