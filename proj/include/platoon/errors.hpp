#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// Bad arguments or mismatched operands supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mathematically undefined operation, e.g. inverting zero.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form term was evaluated outside the state range it covers.
class BoundaryError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An exhaustive computation was refused because the instance is too large.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace platoon
