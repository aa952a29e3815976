#pragma once

#include <stdexcept>
#include <string>

namespace progle {

// Error taxonomy mirrored by the CLI exit codes: parse -> 2, validation -> 3,
// convergence -> 4. Anything else escapes as a plain std::runtime_error.

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Node labels present on one side of a pairing (graph vs. embedding or label
// file) but not the other. The message lists the first few offenders.
class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved_residual_(achieved_residual) {}

  double achieved_residual() const noexcept { return achieved_residual_; }

 private:
  double achieved_residual_ = 0.0;
};

}  // namespace progle
