#pragma once

#include <stdexcept>
#include <string>

namespace trendfilter {

/// A parameter or argument violates its domain (non-positive rate, n = 0, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation that needs at least one observation received none.
class EmptySeriesError : public InvalidParameter {
 public:
  explicit EmptySeriesError(const std::string& where)
      : InvalidParameter(where + ": empty series") {}
};

/// Factorization failure, quadrature non-convergence and similar.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trendfilter
