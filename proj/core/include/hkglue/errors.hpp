#pragma once

#include <stdexcept>
#include <string>

namespace hkglue {

// Every failure raised by the library derives from Error so callers can
// separate numerical trouble from programming mistakes with one catch.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch: wrong chart, degree overflow, inconsistent dimensions.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Point outside the region where an evaluator is defined (poles, r <= R, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Degenerate metric, zero volume form, quadrature that never settles.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Caller-checkable hypothesis of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Invalid parameter set, rejected table override, bracket without a root.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Iterative solver stopped contracting or ran out of iterations.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace hkglue
