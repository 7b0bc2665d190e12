#pragma once

#include <stdexcept>
#include <string>

namespace pruefer {

/// Violated precondition or malformed input (bad parameters, unsorted grid,
/// evaluation outside a table). Maps to a usage-style failure.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics could not deliver (step underflow, overflow, non-finite state).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pruefer
