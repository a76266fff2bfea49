#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; carries a 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A search ran out of its step budget or hit a rewrite cycle.
class FuelExceeded : public Error {
 public:
  using Error::Error;
};

class SignatureClash : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class NotInTn : public Error {
 public:
  using Error::Error;
};

/// Raised when a guaranteed predicative embedding fails: always a bug.
class EmbeddingViolation : public Error {
 public:
  using Error::Error;
};

/// Raised when the Slow bound fails for a compatible system: always a bug.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

}  // namespace spop
