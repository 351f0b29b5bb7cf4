#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "traybot/controller.hpp"
#include "traybot/plant.hpp"

// Append-only JSONL run log. Every line is one flat JSON object with keys in
// a fixed documented order and floats printed as %.6f, so byte identity of
// two trace files is meaningful.

namespace traybot::sim {

struct StateChangeEvent {
  std::optional<control::MissionState> old_state;  ///< absent on the initial record
  control::MissionState new_state = control::MissionState::Idle;

  friend bool operator==(const StateChangeEvent&, const StateChangeEvent&) = default;
};

struct CommandEvent {
  plant::ActuatorCommand command;

  friend bool operator==(const CommandEvent&, const CommandEvent&) = default;
};

struct PickEvent {
  std::string tray;
  std::string source;  ///< "table", "furnace_port", or "furnace"

  friend bool operator==(const PickEvent&, const PickEvent&) = default;
};

struct ReleaseEvent {
  std::string tray;
  std::string target;  ///< "table", "furnace_port", or "furnace"

  friend bool operator==(const ReleaseEvent&, const ReleaseEvent&) = default;
};

struct BakeDoneEvent {
  std::string tray;

  friend bool operator==(const BakeDoneEvent&, const BakeDoneEvent&) = default;
};

struct DroppedTrayEvent {
  std::string tray;
  double position_mm = 0.0;

  friend bool operator==(const DroppedTrayEvent&, const DroppedTrayEvent&) = default;
};

struct FaultEvent {
  control::FaultReason reason = control::FaultReason::None;

  friend bool operator==(const FaultEvent&, const FaultEvent&) = default;
};

struct EnergySampleEvent {
  double base_j = 0.0;
  double stepper_j = 0.0;
  double gripper_j = 0.0;
  double total_j = 0.0;

  friend bool operator==(const EnergySampleEvent&, const EnergySampleEvent&) = default;
};

using TracePayload = std::variant<StateChangeEvent, CommandEvent, PickEvent, ReleaseEvent,
                                  BakeDoneEvent, DroppedTrayEvent, FaultEvent, EnergySampleEvent>;

struct TraceEvent {
  std::uint64_t tick = 0;
  double clock_s = 0.0;
  TracePayload payload;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Fixed-point float field formatting: six decimals, printf rounding.
std::string format_fixed6(double value);

/// One JSONL line, no trailing newline.
std::string to_jsonl(const TraceEvent& event);

std::vector<std::string> trace_lines(std::span<const TraceEvent> events);

/// Earliest mismatch between two event streams.
struct FirstDivergence {
  std::uint64_t tick = 0;
  std::string field;

  friend bool operator==(const FirstDivergence&, const FirstDivergence&) = default;
};

/// Field-by-field structural comparison of two JSONL streams; nullopt means
/// the traces match.
std::optional<FirstDivergence> compare_traces(std::span<const std::string> actual,
                                              std::span<const std::string> golden);

}  // namespace traybot::sim
