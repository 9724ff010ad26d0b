#pragma once

#include <stdexcept>
#include <string>

namespace oak {

/// Malformed input: bad JSON, unknown kind tags, mixed label kinds.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a data invariant (duplicate pairs, gaps).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form quantity is undefined for the given parameters.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace oak
