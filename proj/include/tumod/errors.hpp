#pragma once

#include <stdexcept>
#include <string>

namespace tumod {

/// Raised when an input exceeds a desk-scale cap (exhaustive enumeration).
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Raised on inconsistent dimensions or out-of-range structural parameters.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when exact integer arithmetic would overflow 64 bits.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Raised when the simplex solver exceeds its iteration cap.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a quantity is undefined at the given input (e.g. division by zero).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed text input (matrix, group, tree or config files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tumod
