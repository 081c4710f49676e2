#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qsat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An instance or term failed validation where a valid one was required.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The requested computation exceeds a configured qubit ceiling.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Bad caller-supplied argument (wrong counts, colliding indices, k < 1, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition did not hold for its input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A satisfiability verdict fell inside the indeterminate band where a
/// definite answer was needed.
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

/// A construction failed its own post-construction spectral checks.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// Malformed instance or report document. `where` names the offending field
/// path or the line/column reported by the JSON parser.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Krylov iteration ran out of restarts. Carries the best iterate so callers
/// can still inspect it.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value, double best_residual,
                   Eigen::VectorXcd best_vector)
      : Error(what),
        best_value_(best_value),
        best_residual_(best_residual),
        best_vector_(std::move(best_vector)) {}

  double best_value() const { return best_value_; }
  double best_residual() const { return best_residual_; }
  const Eigen::VectorXcd& best_vector() const { return best_vector_; }

 private:
  double best_value_;
  double best_residual_;
  Eigen::VectorXcd best_vector_;
};

}  // namespace qsat
