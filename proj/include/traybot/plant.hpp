#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traybot/drive_logic.hpp"
#include "traybot/motors.hpp"

// The simulated world: base on a linear track, one-joint arm, electromagnetic
// gripper, furnace with a bake timer, trays, and stations. World is a value;
// every operation is a pure transition.

namespace traybot::plant {

/// Rated payload of the electromagnetic gripper.
inline constexpr double kPayloadLimitGrams = 200.0;

/// Nominal gripper coil drive level.
inline constexpr double kGripperNominalVolts = 12.0;

enum class StationId : std::uint8_t { Table = 0, FurnacePort = 1 };
inline constexpr std::size_t kStationCount = 2;

constexpr std::size_t station_index(StationId id) noexcept {
  return static_cast<std::size_t>(id);
}

constexpr const char* to_string(StationId id) noexcept {
  return id == StationId::Table ? "table" : "furnace_port";
}

struct Station {
  StationId id = StationId::Table;
  double base_position_mm = 0.0;
  int arm_angle_deg = 90;  ///< always a valid step angle
  double tolerance_mm = 5.0;
};

enum class BakePhase : std::uint8_t { Unbaked, Baking, Baked };

/// Where a tray is. Exactly one of these per tray at every tick; "Dropped"
/// is the synthetic location for a release with no station in range.
struct TrayLocation {
  enum class Kind : std::uint8_t { Station, Furnace, Gripper, Dropped };

  Kind kind = Kind::Station;
  StationId station = StationId::Table;  ///< meaningful for Kind::Station
  double dropped_position_mm = 0.0;      ///< meaningful for Kind::Dropped

  static TrayLocation at_station(StationId id) noexcept {
    return {Kind::Station, id, 0.0};
  }
  static TrayLocation in_furnace() noexcept {
    return {Kind::Furnace, StationId::Table, 0.0};
  }
  static TrayLocation in_gripper() noexcept {
    return {Kind::Gripper, StationId::Table, 0.0};
  }
  static TrayLocation dropped(double position_mm) noexcept {
    return {Kind::Dropped, StationId::Table, position_mm};
  }

  friend bool operator==(const TrayLocation&, const TrayLocation&) = default;
};

struct Tray {
  std::string id;
  double mass_g = 0.0;
  BakePhase bake = BakePhase::Unbaked;
  double bake_elapsed_s = 0.0;  ///< accrues only while in the furnace
  TrayLocation location;
};

struct GripperState {
  double coil_volts = 0.0;
  std::optional<std::string> holding;  ///< tray id; requires coil_volts > 0
  double capture_radius_mm = 5.0;
};

struct FurnaceState {
  std::optional<std::string> occupant;  ///< tray id
  double bake_duration_s = 30.0;
};

/// Gear-slack model: a step seats exactly on its detent with the given
/// probability, otherwise the arm lands offset by +-offset_deg.
struct BacklashModel {
  bool enabled = false;
  double probability = 0.7;
  double offset_deg = 5.0;
};

struct BaseState {
  double position_mm = 0.0;  ///< single track axis; the only base coordinate
  motors::DcMotorState motor;
};

struct PlantParams {
  motors::DcMotorModel motor;
  motors::StepperModel stepper;
  double gripper_coil_resistance_ohm = 24.0;
  BacklashModel backlash;
};

/// Complete plant state.
struct World {
  BaseState base;
  int arm_detent_deg = 0;       ///< seated step angle, always a multiple of 90
  double arm_offset_deg = 0.0;  ///< gear slack; actual angle = detent + offset
  std::optional<double> last_step_time_s;
  GripperState gripper;
  FurnaceState furnace;
  std::vector<Tray> trays;
  std::array<Station, kStationCount> stations{
      Station{StationId::Table, 0.0, 90, 5.0},
      Station{StationId::FurnacePort, 1000.0, 270, 5.0}};
  motors::EnergyLedger ledger;
  double clock_s = 0.0;
  std::uint64_t rng_state = 1;  ///< backlash draws
  PlantParams params;

  double arm_angle_deg() const noexcept {
    return static_cast<double>(arm_detent_deg) + arm_offset_deg;
  }
  const Station& station(StationId id) const noexcept {
    return stations[station_index(id)];
  }
  const Tray* find_tray(std::string_view id) const noexcept;
  Tray* find_tray(std::string_view id) noexcept;
};

/// Raw logic levels and coil voltage the controller puts on the wire.
struct ActuatorCommand {
  logic::HBridgeInput hbridge;
  std::optional<logic::StepDirection> step_request;
  double gripper_volts = 0.0;

  friend bool operator==(const ActuatorCommand&, const ActuatorCommand&) = default;
};

/// Deterministic projection of World; all the controller ever sees.
struct SensorFrame {
  std::array<bool, kStationCount> at_station{};
  double arm_angle_deg = 0.0;
  bool holding = false;
  bool furnace_done = false;
  double clock_s = 0.0;

  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

enum class PickFailure : std::uint8_t { NothingThere, Overload };

struct PickResult {
  World world;
  std::optional<std::string> picked_tray;   ///< set on success
  std::optional<PickFailure> failure;       ///< set on failure
  bool from_furnace = false;
  std::optional<StationId> source_station;  ///< set when picked off a station
};

struct ReleaseResult {
  World world;
  std::optional<std::string> released_tray;  ///< set when a tray was held
  std::optional<TrayLocation> placed_at;
};

/// What one plant tick produced, for event tracing.
struct TickEvents {
  bool arm_stepped = false;
  std::optional<std::string> picked_tray;
  bool pick_from_furnace = false;
  std::optional<StationId> pick_station;
  std::optional<PickFailure> pick_failure;
  std::optional<std::string> released_tray;
  std::optional<TrayLocation> release_location;
  std::optional<std::string> bake_done_tray;
};

struct TickResult {
  World world;
  TickEvents events;
};

/// Furnace done line: occupant present and fully baked.
bool furnace_done_signal(const World& world) noexcept;

/// Project the sensor lines. Identical worlds yield identical frames.
SensorFrame sense(const World& world) noexcept;

/// Energize the coil at nominal voltage and try to capture a tray at the
/// current pose. Capture needs both the base position and arm angle to match
/// a station; a matching tray above the payload limit stays put (Overload)
/// with the coil still energized. Requires an empty gripper.
PickResult gripper_energize(World world);

/// Drop the coil to 0 V. A held tray lands at the station matching the
/// current pose (into the furnace at the furnace port); with no station in
/// range it is dropped where the robot stands. Always succeeds.
ReleaseResult gripper_release(World world);

/// One backlash draw for a step landing: 0 with the configured probability,
/// otherwise +-offset_deg with the sign from a second draw. A disabled model
/// returns 0 without consuming randomness.
double apply_backlash(const BacklashModel& model, std::uint64_t& rng_state) noexcept;

/// Advance the plant by one tick: base drive from the H-bridge lines, at
/// most one rate-gated arm step, furnace bake progress, then gripper
/// pick/release at the post-motion pose. Energy accrues to the ledger and
/// the clock advances by dt. Throws InvalidTimestep and OverVoltageError.
TickResult plant_tick(World world, const ActuatorCommand& command, double dt_s);

}  // namespace traybot::plant
