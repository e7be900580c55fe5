#pragma once

#include <stdexcept>
#include <string>

namespace retina {

// Malformed input file; message cites file and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Referential-integrity violation in a knowledge base.
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

// S-expression syntax / arity / unknown-function error.
class SExprError : public std::runtime_error {
 public:
  SExprError(const std::string& msg, size_t position)
      : std::runtime_error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

// Executing an expression that fails type-level validity.
class ValidityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad CLI invocation or missing required artifact (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace retina
