#pragma once

#include <stdexcept>
#include <string>

namespace ascqa {

/// Invalid problem definition (chain length, sector size, couplings, schedule samples).
class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function, e.g. s outside [0, 1].
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A decomposition, determinant, or integrator failed to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force routine asked for a Hilbert space larger than its cap.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Malformed experiment configuration. `line()` is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ascqa
