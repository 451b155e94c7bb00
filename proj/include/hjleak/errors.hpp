#pragma once

#include <stdexcept>
#include <string>

namespace hjleak {

// Invalid configuration or parameters (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Out-of-range index, shape mismatch, misaligned series.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical failure during a solve (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflError : public NumericalError {
 public:
  CflError(const std::string& what, double cfl_number, double max_delta)
      : NumericalError(what), cfl_number_(cfl_number), max_delta_(max_delta) {}

  double cfl_number() const { return cfl_number_; }
  double max_delta() const { return max_delta_; }

 private:
  double cfl_number_;
  double max_delta_;
};

// The model's dynamics are not self-contained under the requested partition.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hjleak
