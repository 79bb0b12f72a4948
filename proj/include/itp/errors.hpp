#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace itp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant was violated (non-refining partition, unnormalized
/// measure, non-measurable act, non-monotone curve, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the range of a utility curve, or an index is out of
/// bounds.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with arguments violating its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Scenario file syntax error with 1-based position.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace itp
