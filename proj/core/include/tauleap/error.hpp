#pragma once

#include <stdexcept>
#include <string>

namespace tauleap {

/// Malformed model, inconsistent dimensions, missing snapshots and similar
/// caller-side mistakes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-domain argument to a sampler or formula (negative mean, p outside
/// [0,1], all-zero weights, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: halving depth exhausted, singular solve, unreachable
/// tolerance, broken history invariants.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tauleap
