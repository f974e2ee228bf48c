#pragma once

#include <stdexcept>
#include <string>

namespace bml {

/// Precondition or invariant violation on caller-supplied data.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown during time integration (CFL exhaustion, NaN).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal guarantee; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bml
