#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cgq {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input that parses but violates a model invariant (schema arity/kind, self-loop, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Query and index (or two graphs) were built against different feature schemas.
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

/// Index file with wrong magic, unsupported version or truncated payload.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgq
