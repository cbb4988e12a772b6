#pragma once

#include <stdexcept>
#include <string>

namespace roughldp {

/// Bad argument values: non-finite data, out-of-range parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two grid objects that must share a grid do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside a function's domain (e.g. the kernel at t <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation requires a different kernel or function family.
class FamilyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unknown preset or family name.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Rate functional denominator vanishes (f == 0 on every quadrature node).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Option price outside the no-arbitrage bounds of the Black-Scholes map.
class InversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ODE state became non-finite.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monte Carlo estimator unusable, e.g. too many excluded paths.
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roughldp
