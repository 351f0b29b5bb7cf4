#pragma once

#include <array>
#include <cstdint>

#include "traybot/errors.hpp"

// Pure, total codecs for the two drive-circuit logic tables plus the input
// buffer voltage guard. No state, no time; safe from any thread.

namespace traybot::logic {

/// A single digital control line. Only these two values exist; raw integers
/// coming off a wire must go through level_from_bit().
enum class LogicLevel : std::uint8_t { Low = 0, High = 1 };

constexpr int to_bit(LogicLevel level) noexcept {
  return level == LogicLevel::High ? 1 : 0;
}

constexpr LogicLevel complement(LogicLevel level) noexcept {
  return level == LogicLevel::High ? LogicLevel::Low : LogicLevel::High;
}

inline LogicLevel level_from_bit(int bit) {
  if (bit == 0) return LogicLevel::Low;
  if (bit == 1) return LogicLevel::High;
  throw std::invalid_argument("logic level must be 0 or 1");
}

/// The two control lines of the base-motor H-bridge. All four combinations
/// are meaningful inputs.
struct HBridgeInput {
  LogicLevel a = LogicLevel::Low;
  LogicLevel b = LogicLevel::Low;

  friend constexpr bool operator==(HBridgeInput, HBridgeInput) = default;
};

enum class DriveCommand : std::uint8_t { Forward, Reverse, Stop };

constexpr const char* to_string(DriveCommand command) noexcept {
  switch (command) {
    case DriveCommand::Forward: return "Forward";
    case DriveCommand::Reverse: return "Reverse";
    case DriveCommand::Stop: break;
  }
  return "Stop";
}

/// Decode the H-bridge line pair: (1,0) drives forward, (0,1) reverse, and
/// both equal-level pairs stop the motor. Total: stop iff a == b.
constexpr DriveCommand decode_hbridge(HBridgeInput input) noexcept {
  if (input.a == input.b) return DriveCommand::Stop;
  return input.a == LogicLevel::High ? DriveCommand::Forward : DriveCommand::Reverse;
}

/// Canonical line pair for a command. Stop encodes as (0,0): the (1,1) row
/// decodes fine but is never emitted, since driving both legs high shorts a
/// physical bridge.
constexpr HBridgeInput encode_drive(DriveCommand command) noexcept {
  switch (command) {
    case DriveCommand::Forward: return {LogicLevel::High, LogicLevel::Low};
    case DriveCommand::Reverse: return {LogicLevel::Low, LogicLevel::High};
    case DriveCommand::Stop: break;
  }
  return {LogicLevel::Low, LogicLevel::Low};
}

inline constexpr std::array<int, 4> kStepAngles = {0, 90, 180, 270};

constexpr bool is_step_angle(int angle_deg) noexcept {
  return angle_deg == 0 || angle_deg == 90 || angle_deg == 180 || angle_deg == 270;
}

class StepperPhase;
StepperPhase phase_for_angle(int angle_deg);

/// One excitation state of the four stepper drive lines (x, x', y, y').
/// Complementarity (x != x', y != y') is enforced at construction, so exactly
/// four phases are representable -- one per 90-degree detent.
class StepperPhase {
 public:
  /// Validate a raw four-line pattern, e.g. decoded from a wire or a file.
  static StepperPhase from_lines(LogicLevel x, LogicLevel x_bar,
                                 LogicLevel y, LogicLevel y_bar) {
    if (x == x_bar || y == y_bar) {
      throw InvalidPhase("stepper phase lines must be pairwise complementary");
    }
    return StepperPhase(x, y);
  }

  constexpr LogicLevel x() const noexcept { return x_; }
  constexpr LogicLevel x_bar() const noexcept { return complement(x_); }
  constexpr LogicLevel y() const noexcept { return y_; }
  constexpr LogicLevel y_bar() const noexcept { return complement(y_); }

  friend constexpr bool operator==(StepperPhase, StepperPhase) = default;

 private:
  constexpr StepperPhase(LogicLevel x, LogicLevel y) noexcept : x_(x), y_(y) {}
  friend StepperPhase phase_for_angle(int angle_deg);

  LogicLevel x_;
  LogicLevel y_;
};

/// Line pattern for a step angle:
///   0   -> (0,1,0,1)
///   90  -> (1,0,0,1)
///   180 -> (1,0,1,0)
///   270 -> (0,1,1,0)
inline StepperPhase phase_for_angle(int angle_deg) {
  switch (angle_deg) {
    case 0: return StepperPhase(LogicLevel::Low, LogicLevel::Low);
    case 90: return StepperPhase(LogicLevel::High, LogicLevel::Low);
    case 180: return StepperPhase(LogicLevel::High, LogicLevel::High);
    case 270: return StepperPhase(LogicLevel::Low, LogicLevel::High);
    default: break;
  }
  throw NotAStepAngle("step angle must be one of 0, 90, 180, 270 degrees");
}

/// Exact inverse of phase_for_angle. Total: every constructible phase is one
/// of the four table rows.
constexpr int angle_for_phase(StepperPhase phase) noexcept {
  if (phase.y() == LogicLevel::Low) {
    return phase.x() == LogicLevel::Low ? 0 : 90;
  }
  return phase.x() == LogicLevel::High ? 180 : 270;
}

/// Clockwise walks the excitation table in ascending angle order and wraps
/// 270 -> 0; counter-clockwise is the exact reverse cycle.
enum class StepDirection : std::uint8_t { Clockwise, CounterClockwise };

inline StepperPhase next_phase(StepperPhase current, StepDirection direction) {
  const int delta = direction == StepDirection::Clockwise ? 90 : 270;
  return phase_for_angle((angle_for_phase(current) + delta) % 360);
}

/// Highest level the drive-electronics input buffers tolerate.
inline constexpr double kBufferToleranceVolts = 15.0;

/// Non-negative voltage presented to a buffer input.
class BufferVoltage {
 public:
  explicit BufferVoltage(double volts) : volts_(volts) {
    if (!(volts >= 0.0)) {
      throw std::invalid_argument("buffer voltage must be >= 0 V");
    }
  }

  double volts() const noexcept { return volts_; }

 private:
  double volts_;
};

/// Guard verdict; violations carry the offending value and are flagged,
/// never silently accepted.
struct VoltageCheck {
  bool ok = true;
  double volts = 0.0;
};

/// Accepts anything up to and including the tolerance limit.
inline VoltageCheck check_buffer_voltage(BufferVoltage v) noexcept {
  return {v.volts() <= kBufferToleranceVolts, v.volts()};
}

}  // namespace traybot::logic
