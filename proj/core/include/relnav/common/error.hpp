#pragma once

#include <stdexcept>
#include <string>

namespace relnav {

// Base class for all library errors. CLI maps these to exit code 1,
// UsageError to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor/operand dimension mismatch. Message names both shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A documented precondition or invariant was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Unknown node, category or parameter name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// File read/write or schema-version mismatch.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bad command-line flags or malformed top-level configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace relnav
