#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nystrom {

// Base of every error raised by the library. The CLI maps the subclasses
// onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's precondition (k > rank, c > m, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// SVD / decomposition failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be invertible is not (W in the fast intersection path).
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input with unusable content (non-numeric cell, NaN, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Adaptive sampling ran out of columns with positive residual mass.
class ExhaustionError : public Error {
 public:
  ExhaustionError(std::size_t requested, std::size_t drawable)
      : Error("adaptive sampling exhausted: requested " + std::to_string(requested) +
              " fresh columns, only " + std::to_string(drawable) + " drawable"),
        requested_(requested),
        drawable_(drawable) {}
  std::size_t requested() const noexcept { return requested_; }
  std::size_t drawable() const noexcept { return drawable_; }

 private:
  std::size_t requested_;
  std::size_t drawable_;
};

}  // namespace nystrom
