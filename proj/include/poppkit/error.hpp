#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poppkit {

/// Default relative tolerance for floating-point comparisons.
inline constexpr double kDefaultTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `line` is 0 when the input is a single expression.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(Format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string Format(const std::string& message, std::size_t line,
                            std::size_t column) {
    if (line == 0) return message + " (at column " + std::to_string(column) + ")";
    return message + " (at line " + std::to_string(line) + ", column " +
           std::to_string(column) + ")";
  }

  std::size_t line_;
  std::size_t column_;
};

/// Well-formed input that fails validation or name resolution.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Singular or indefinite matrices where a nonsingular or SPD one is required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The geometric hypotheses fail: not bracket generating, not adapted,
/// not contact, degenerate pullback.
class GeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace poppkit
