#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace degtk {

// Input or contract violation: bad dimensions, vanishing fields where a
// normalization is needed, unresolvable scans. The CLI maps these to exit 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A mathematical cross-check failed: two independent methods disagree, or an
// integer identity that must hold does not. The CLI maps these to exit 2.
class CrossCheckError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Field norm fell at or below the floor at some probed point.
class MinNormViolation : public ValidationError {
public:
  MinNormViolation(const std::string& msg, std::vector<double> witness_point, double norm)
      : ValidationError(msg), witness(std::move(witness_point)), norm(norm) {}

  std::vector<double> witness;
  double norm = 0.0;
};

}  // namespace degtk
