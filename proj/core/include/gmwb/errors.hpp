#pragma once

#include <stdexcept>
#include <string>

namespace gmwb {

/// Invalid user-supplied configuration. `field()` names the offending field
/// as a dotted path, e.g. "contract.penalty_rate".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite or otherwise unusable intermediate value inside a solver.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The fee root is not bracketed by the configured interval.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gmwb
