#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "traybot/plant.hpp"

// Firmware-style mission controller: a total function of (status, frame)
// that emits raw logic levels every tick. Abnormal conditions become Fault
// states, never exceptions.

namespace traybot::control {

/// Mission phases, in cycle order, plus the terminal states. The transition
/// graph is the linear chain with self-loops while a phase is in progress
/// and edges to Fault.
enum class MissionState : std::uint8_t {
  Idle,
  AlignArmToTable,
  PickFromTable,
  TransportToFurnace,
  AlignArmToFurnace,
  PlaceInFurnace,
  WaitBake,
  RetrieveFromFurnace,
  TransportToTable,
  AlignArmToTableReturn,
  PlaceOnTable,
  Done,
  Fault,
};

enum class FaultReason : std::uint8_t { None, Timeout, PickFailed, TrayLost };

const char* to_string(MissionState state) noexcept;
const char* to_string(FaultReason reason) noexcept;

struct ControllerStatus {
  MissionState state = MissionState::Idle;
  FaultReason fault = FaultReason::None;
  std::uint32_t ticks_in_state = 0;

  friend bool operator==(const ControllerStatus&, const ControllerStatus&) = default;
};

struct ControllerConfig {
  plant::StationId pick_station = plant::StationId::Table;
  plant::StationId place_station = plant::StationId::FurnacePort;
  int pick_arm_angle_deg = 90;
  int place_arm_angle_deg = 270;
  /// A phase stuck longer than this faults out (Idle, Done, Fault exempt).
  std::uint32_t watchdog_ticks = 3000;
};

struct ControlStep {
  ControllerStatus status;
  plant::ActuatorCommand command;
};

/// One controller cycle: advance the mission state on the fresh frame, then
/// emit the actuator command for the resulting phase. Total over all inputs.
ControlStep controller_tick(ControllerStatus status, const plant::SensorFrame& frame,
                            const ControllerConfig& config) noexcept;

/// Left-fold of controller_tick over a frame sequence; pure FSM replay with
/// no plant attached.
std::vector<ControlStep> mission_trace(ControllerStatus initial,
                                       std::span<const plant::SensorFrame> frames,
                                       const ControllerConfig& config);

}  // namespace traybot::control
