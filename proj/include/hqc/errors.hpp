#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hqc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different numbers of qubits.
class SizeMismatch : public Error {
 public:
  SizeMismatch(std::size_t lhs, std::size_t rhs)
      : Error("qubit count mismatch: " + std::to_string(lhs) + " vs " + std::to_string(rhs)) {}
};

/// Malformed text input. `line()` is 1-based, or 0 when the input is a single token.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A precondition on a domain object failed (invalid schedule, bad gate, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical integration lost accuracy (norm drift, leakage over the hard cap).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hqc
