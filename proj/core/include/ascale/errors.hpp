#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ascale {

// Bad caller input: mismatched shapes, invalid options, out-of-range values.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: singular systems, non-positive-definite matrices,
// unstable statistics.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An iterative solver hit its sweep cap.  Carries the per-sweep objective
// values so the caller can see whether the run was oscillating or crawling.
class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& what, std::vector<double> trace)
      : NumericalError(what), objective_trace(std::move(trace)) {}

  std::vector<double> objective_trace;
};

// Model training failure, e.g. diverging gradient descent.
class TrainingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// File and parse problems; messages carry 1-based row/column context.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ArgumentError(message);
}

}  // namespace detail

}  // namespace ascale
