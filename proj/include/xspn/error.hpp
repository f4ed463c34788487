#pragma once

#include <stdexcept>
#include <string>

namespace xspn {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad rows, missing variables, empty sets).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a documented size limit (exact enumeration, recursion depth, ...).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A model or classifier file does not match the expected layout.
/// The message starts with the offending field path, e.g. `nodes[3].weights`.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace xspn
