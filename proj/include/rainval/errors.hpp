#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rainval {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line` is 1-based; `column` is the 1-based CSV field
/// index, or 0 when the problem is not tied to a single field.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : Error(what), line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

/// Input that parses but violates a domain bound.
struct ValidationError : Error {
  using Error::Error;
};

/// Binary payload that does not match its descriptor.
struct FormatError : Error {
  using Error::Error;
};

/// File missing, unreadable or unwritable.
struct IoError : Error {
  using Error::Error;
};

/// A model cannot be fitted to the given data (single outcome class, too few
/// observations).
struct FitError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// An internal consistency check failed; always a bug.
struct InvariantError : Error {
  using Error::Error;
};

}  // namespace rainval
