#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conceptx {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes (JSONL / CSV / JSON). Carries the 1-based line number
/// when known, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose values violate a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Unknown concept name, or inconsistent concept schemas.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A conditional expectation whose conditioning set has zero mass.
class UndefinedMeasureError : public Error {
 public:
  using Error::Error;
};

/// A scalar argument outside the range where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Planted synthetic targets that cannot be realized.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  SamplingError(const std::string& what, double acceptance_rate)
      : Error(what + " (acceptance rate " + std::to_string(acceptance_rate) + ")"),
        acceptance_rate_(acceptance_rate) {}
  double acceptance_rate() const noexcept { return acceptance_rate_; }

 private:
  double acceptance_rate_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace conceptx
