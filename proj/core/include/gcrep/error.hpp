#pragma once

#include <stdexcept>
#include <string>

namespace gcrep {

/// Raised when a caller violates an operation's preconditions
/// (dimension mismatch, out-of-range parameter, non-finite input).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical kernel (SVD, Cholesky) fails on its input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for file-format and filesystem problems.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gcrep
