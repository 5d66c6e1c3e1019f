// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace kgpml {

/// Invalid user-facing parameters (grid sizes, profile settings, config files).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an API precondition (mismatched sizes, wrong grid).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A time stepper produced non-finite or runaway values.
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& what, long time_index)
      : std::runtime_error(what + " (time index " + std::to_string(time_index) + ")"),
        time_index_(time_index) {}

  long time_index() const noexcept { return time_index_; }

private:
  long time_index_;
};

/// GMRES hit its iteration cap inside a time step.
class SolverDivergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace kgpml
