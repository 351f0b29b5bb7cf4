#include "traybot/controller.hpp"

#include <cmath>

namespace traybot::control {

namespace {

using logic::DriveCommand;
using logic::StepDirection;
using plant::ActuatorCommand;
using plant::SensorFrame;

ActuatorCommand quiet() {
  return {logic::encode_drive(DriveCommand::Stop), std::nullopt, 0.0};
}

// Signed rotation from current to target, normalized to (-180, 180]; a
// 180-degree difference resolves clockwise.
double angle_error(double target_deg, double current_deg) {
  double diff = std::fmod(target_deg - current_deg, 360.0);
  if (diff <= -180.0) diff += 360.0;
  if (diff > 180.0) diff -= 360.0;
  return diff;
}

std::optional<StepDirection> step_toward(double target_deg, double current_deg) {
  const double err = angle_error(target_deg, current_deg);
  if (err == 0.0) return std::nullopt;
  return err > 0.0 ? StepDirection::Clockwise : StepDirection::CounterClockwise;
}

bool arm_at(const SensorFrame& frame, int target_deg) {
  return frame.arm_angle_deg == static_cast<double>(target_deg);
}

MissionState advance(MissionState state, FaultReason& fault, const SensorFrame& frame,
                     const ControllerConfig& config) {
  const bool at_pick = frame.at_station[plant::station_index(config.pick_station)];
  const bool at_place = frame.at_station[plant::station_index(config.place_station)];

  switch (state) {
    case MissionState::Idle:
      // The mission begins once the robot stands at the pick station.
      return at_pick ? MissionState::AlignArmToTable : state;
    case MissionState::AlignArmToTable:
      return arm_at(frame, config.pick_arm_angle_deg) ? MissionState::PickFromTable : state;
    case MissionState::PickFromTable:
      return frame.holding ? MissionState::TransportToFurnace : state;
    case MissionState::TransportToFurnace:
      if (!frame.holding) {
        fault = FaultReason::TrayLost;
        return MissionState::Fault;
      }
      return at_place ? MissionState::AlignArmToFurnace : state;
    case MissionState::AlignArmToFurnace:
      if (!frame.holding) {
        fault = FaultReason::TrayLost;
        return MissionState::Fault;
      }
      return arm_at(frame, config.place_arm_angle_deg) ? MissionState::PlaceInFurnace : state;
    case MissionState::PlaceInFurnace:
      return frame.holding ? state : MissionState::WaitBake;
    case MissionState::WaitBake:
      return frame.furnace_done ? MissionState::RetrieveFromFurnace : state;
    case MissionState::RetrieveFromFurnace:
      return frame.holding ? MissionState::TransportToTable : state;
    case MissionState::TransportToTable:
      if (!frame.holding) {
        fault = FaultReason::TrayLost;
        return MissionState::Fault;
      }
      return at_pick ? MissionState::AlignArmToTableReturn : state;
    case MissionState::AlignArmToTableReturn:
      if (!frame.holding) {
        fault = FaultReason::TrayLost;
        return MissionState::Fault;
      }
      return arm_at(frame, config.pick_arm_angle_deg) ? MissionState::PlaceOnTable : state;
    case MissionState::PlaceOnTable:
      return frame.holding ? state : MissionState::Done;
    case MissionState::Done:
    case MissionState::Fault:
      return state;
  }
  return state;
}

ActuatorCommand emit(MissionState state, const SensorFrame& frame,
                     const ControllerConfig& config) {
  ActuatorCommand command = quiet();
  switch (state) {
    case MissionState::AlignArmToTable:
      command.step_request = step_toward(config.pick_arm_angle_deg, frame.arm_angle_deg);
      break;
    case MissionState::PickFromTable:
    case MissionState::RetrieveFromFurnace:
      command.gripper_volts = plant::kGripperNominalVolts;
      break;
    case MissionState::TransportToFurnace:
      command.hbridge = logic::encode_drive(DriveCommand::Forward);
      command.gripper_volts = plant::kGripperNominalVolts;
      break;
    case MissionState::AlignArmToFurnace:
      command.step_request = step_toward(config.place_arm_angle_deg, frame.arm_angle_deg);
      command.gripper_volts = plant::kGripperNominalVolts;
      break;
    case MissionState::TransportToTable:
      command.hbridge = logic::encode_drive(DriveCommand::Reverse);
      command.gripper_volts = plant::kGripperNominalVolts;
      break;
    case MissionState::AlignArmToTableReturn:
      command.step_request = step_toward(config.pick_arm_angle_deg, frame.arm_angle_deg);
      command.gripper_volts = plant::kGripperNominalVolts;
      break;
    case MissionState::Idle:
    case MissionState::PlaceInFurnace:  // 0 V releases the tray
    case MissionState::WaitBake:
    case MissionState::PlaceOnTable:
    case MissionState::Done:
    case MissionState::Fault:
      break;
  }
  return command;
}

bool watchdog_applies(MissionState state) {
  return state != MissionState::Idle && state != MissionState::Done &&
         state != MissionState::Fault;
}

bool pick_phase(MissionState state) {
  return state == MissionState::PickFromTable || state == MissionState::RetrieveFromFurnace;
}

}  // namespace

const char* to_string(MissionState state) noexcept {
  switch (state) {
    case MissionState::Idle: return "Idle";
    case MissionState::AlignArmToTable: return "AlignArmToTable";
    case MissionState::PickFromTable: return "PickFromTable";
    case MissionState::TransportToFurnace: return "TransportToFurnace";
    case MissionState::AlignArmToFurnace: return "AlignArmToFurnace";
    case MissionState::PlaceInFurnace: return "PlaceInFurnace";
    case MissionState::WaitBake: return "WaitBake";
    case MissionState::RetrieveFromFurnace: return "RetrieveFromFurnace";
    case MissionState::TransportToTable: return "TransportToTable";
    case MissionState::AlignArmToTableReturn: return "AlignArmToTableReturn";
    case MissionState::PlaceOnTable: return "PlaceOnTable";
    case MissionState::Done: return "Done";
    case MissionState::Fault: break;
  }
  return "Fault";
}

const char* to_string(FaultReason reason) noexcept {
  switch (reason) {
    case FaultReason::None: return "None";
    case FaultReason::Timeout: return "Timeout";
    case FaultReason::PickFailed: return "PickFailed";
    case FaultReason::TrayLost: break;
  }
  return "TrayLost";
}

ControlStep controller_tick(ControllerStatus status, const plant::SensorFrame& frame,
                            const ControllerConfig& config) noexcept {
  FaultReason fault = status.fault;
  const MissionState next = advance(status.state, fault, frame, config);

  if (next != status.state) {
    status = ControllerStatus{next, fault, 0};
  } else {
    status.ticks_in_state += 1;
    if (watchdog_applies(status.state) && status.ticks_in_state > config.watchdog_ticks) {
      const FaultReason reason =
          pick_phase(status.state) ? FaultReason::PickFailed : FaultReason::Timeout;
      status = ControllerStatus{MissionState::Fault, reason, 0};
    }
  }

  return {status, emit(status.state, frame, config)};
}

std::vector<ControlStep> mission_trace(ControllerStatus initial,
                                       std::span<const plant::SensorFrame> frames,
                                       const ControllerConfig& config) {
  std::vector<ControlStep> out;
  out.reserve(frames.size());
  ControllerStatus status = initial;
  for (const plant::SensorFrame& frame : frames) {
    ControlStep step = controller_tick(status, frame, config);
    status = step.status;
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace traybot::control
