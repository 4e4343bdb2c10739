#pragma once

#include <stdexcept>
#include <string>

namespace stflow {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or argument violation (bad grid, mismatched sizes, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a point where a closed form is singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A fixed-point iterate became non-finite.
class DivergenceError : public Error {
 public:
  DivergenceError(int iteration, const std::string& what)
      : Error("divergence at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace stflow
