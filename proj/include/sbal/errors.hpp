#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sbal {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract arguments (non-finite entries, zero vectors, bad lengths).
class InputError : public Error {
 public:
  using Error::Error;
};

// A mathematically valid request outside the domain of an operation,
// e.g. evaluating the trajectory at or beyond the escape time.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::optional<double> escape_time = std::nullopt)
      : Error(what), escape_time_(escape_time) {}

  std::optional<double> escape_time() const { return escape_time_; }

 private:
  std::optional<double> escape_time_;
};

// lambda_star below the dominant eigenvalue of the initial state.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// A post-condition that must hold mathematically did not hold numerically.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// The numerical integrator exceeded the blow-up guard.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_t) : Error(what), last_valid_t_(last_valid_t) {}

  double last_valid_t() const { return last_valid_t_; }

 private:
  double last_valid_t_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Missing records needed to assemble a yearly network.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace sbal
