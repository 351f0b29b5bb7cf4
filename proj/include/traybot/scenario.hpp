#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traybot/controller.hpp"
#include "traybot/plant.hpp"

// Scenario files: flat UTF-8 text, one `key = value` per line, `#` comments,
// dotted keys for nesting. Unknown keys are errors so typos never pass
// silently. Omitted fields take the defaults below.

namespace traybot::sim {

struct TraySpec {
  std::string id;
  double mass_g = 150.0;
  plant::TrayLocation location = plant::TrayLocation::at_station(plant::StationId::Table);
};

struct RobotDimensions {
  double length_in = 21.0;
  double height_in = 17.0;
  double width_in = 10.0;
};

struct Scenario {
  double dt_s = 0.1;
  std::uint64_t max_ticks = 20000;
  double bake_duration_s = 30.0;
  std::array<plant::Station, plant::kStationCount> stations{
      plant::Station{plant::StationId::Table, 0.0, 90, 5.0},
      plant::Station{plant::StationId::FurnacePort, 1000.0, 270, 5.0}};
  std::vector<TraySpec> trays{TraySpec{"tray-1", 150.0,
                                       plant::TrayLocation::at_station(plant::StationId::Table)}};
  motors::DcMotorModel motor;
  motors::StepperModel stepper;
  double gripper_coil_resistance_ohm = 24.0;
  double gripper_capture_radius_mm = 5.0;
  plant::BacklashModel backlash;
  std::uint64_t backlash_seed = 1;
  RobotDimensions robot;
  double furnace_port_opening_in = 12.0;
  /// Absent: derived as 10x the longest expected phase duration.
  std::optional<std::uint32_t> watchdog_ticks;
  double start_position_mm = 0.0;
  int start_arm_angle_deg = 0;
};

/// Parse a scenario document. Throws ConfigError naming the offending field.
Scenario load_scenario(std::string_view text);

/// Parse a scenario file from disk. Throws ConfigError (field "file") when
/// the file cannot be read.
Scenario load_scenario_file(const std::filesystem::path& path);

/// Validate invariants of an already-built Scenario (used by both the parser
/// and programmatic construction). Throws ConfigError.
void validate(const Scenario& scenario);

/// Watchdog used when the scenario does not pin one: ten times the longest
/// expected phase duration, in ticks.
std::uint32_t derived_watchdog_ticks(const Scenario& scenario);

plant::World make_world(const Scenario& scenario);
control::ControllerConfig make_controller_config(const Scenario& scenario);

}  // namespace traybot::sim
