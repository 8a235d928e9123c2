#pragma once

#include <stdexcept>
#include <string>

namespace nilkit {

/// Malformed input: bad JSON, bad rational literal, wrong shape.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A desk-scale cap (step, dimension, N, set size, ...) was exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the mathematical input does not hold.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An identity that the construction guarantees failed to hold; signals a bug.
class InvariantFailure : public std::runtime_error {
 public:
  InvariantFailure(std::string module, std::string witness)
      : std::runtime_error(module + ": " + witness), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace nilkit
