#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace traybot {

// Contract violations (bad step angles, malformed wire patterns, non-positive
// timesteps) throw. Expected runtime outcomes -- rate limiting, pick failures,
// voltage flags -- are returned as values instead.

class NotAStepAngle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidPhase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidTimestep : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NegativeSpeed : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A logic input above the buffer tolerance reached the plant.
class OverVoltageError : public std::runtime_error {
 public:
  explicit OverVoltageError(double volts)
      : std::runtime_error("input exceeds buffer tolerance: " + std::to_string(volts) + " V"),
        volts_(volts) {}

  double volts() const noexcept { return volts_; }

 private:
  double volts_;
};

/// Scenario file rejected; names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string reason)
      : std::runtime_error(field + ": " + reason),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

}  // namespace traybot
