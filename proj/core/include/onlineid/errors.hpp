#pragma once

#include <stdexcept>
#include <string>

namespace onlineid {

/// Violated precondition of a library call (wrong window, negative alpha, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid numerical input such as NaN samples or a degenerate mesh.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the banded direct solver. Carries the estimated 1-norm
/// condition number (infinity for an exactly singular pivot).
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double condition_estimate);
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Malformed or unknown configuration entry. `field()` names the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace onlineid
