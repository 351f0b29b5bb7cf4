#include "traybot/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "traybot/errors.hpp"

namespace traybot::sim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(const std::string& key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string text(value);
    const double parsed = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(parsed)) throw std::invalid_argument("not finite");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + std::string(value) + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, std::string_view value) {
  std::uint64_t parsed = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(key, "expected an unsigned integer, got '" + std::string(value) + "'");
  }
  return parsed;
}

int parse_int(const std::string& key, std::string_view value) {
  int parsed = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(value) + "'");
  }
  return parsed;
}

bool parse_bool(const std::string& key, std::string_view value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(value) + "'");
}

plant::TrayLocation parse_location(const std::string& key, std::string_view value) {
  if (value == "table") return plant::TrayLocation::at_station(plant::StationId::Table);
  if (value == "furnace_port") {
    return plant::TrayLocation::at_station(plant::StationId::FurnacePort);
  }
  if (value == "furnace") return plant::TrayLocation::in_furnace();
  throw ConfigError(key, "expected table, furnace_port, or furnace");
}

plant::Station& station_for(Scenario& sc, std::string_view name, const std::string& key) {
  if (name == "table") return sc.stations[plant::station_index(plant::StationId::Table)];
  if (name == "furnace_port") {
    return sc.stations[plant::station_index(plant::StationId::FurnacePort)];
  }
  throw ConfigError(key, "unknown station (expected table or furnace_port)");
}

TraySpec& tray_for(Scenario& sc, bool& trays_customized, std::string_view id) {
  if (!trays_customized) {
    // Any trays.* key replaces the default tray list.
    sc.trays.clear();
    trays_customized = true;
  }
  for (TraySpec& tray : sc.trays) {
    if (tray.id == id) return tray;
  }
  sc.trays.push_back(TraySpec{std::string(id), 150.0,
                              plant::TrayLocation::at_station(plant::StationId::Table)});
  return sc.trays.back();
}

void apply_key(Scenario& sc, bool& trays_customized, const std::string& key,
               std::string_view value) {
  if (key == "dt") sc.dt_s = parse_double(key, value);
  else if (key == "max_ticks") sc.max_ticks = parse_u64(key, value);
  else if (key == "bake_duration_s") sc.bake_duration_s = parse_double(key, value);
  else if (key == "watchdog_ticks") {
    sc.watchdog_ticks = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (key == "motor.target_speed_mm_s") sc.motor.target_speed_mm_s = parse_double(key, value);
  else if (key == "motor.time_constant_s") sc.motor.time_constant_s = parse_double(key, value);
  else if (key == "motor.efficiency") sc.motor.efficiency = parse_double(key, value);
  else if (key == "motor.drag_constant_n") sc.motor.drag_constant_n = parse_double(key, value);
  else if (key == "stepper.max_step_rate_hz") sc.stepper.max_step_rate_hz = parse_double(key, value);
  else if (key == "stepper.rated_power_w") sc.stepper.rated_power_w = parse_double(key, value);
  else if (key == "stepper.holding_torque_nm") {
    sc.stepper.holding_torque_nm = parse_double(key, value);
  } else if (key == "gripper.coil_resistance_ohm") {
    sc.gripper_coil_resistance_ohm = parse_double(key, value);
  } else if (key == "gripper.capture_radius_mm") {
    sc.gripper_capture_radius_mm = parse_double(key, value);
  } else if (key == "backlash.enabled") sc.backlash.enabled = parse_bool(key, value);
  else if (key == "backlash.seed") sc.backlash_seed = parse_u64(key, value);
  else if (key == "backlash.probability") sc.backlash.probability = parse_double(key, value);
  else if (key == "backlash.offset_deg") sc.backlash.offset_deg = parse_double(key, value);
  else if (key == "robot.length_in") sc.robot.length_in = parse_double(key, value);
  else if (key == "robot.height_in") sc.robot.height_in = parse_double(key, value);
  else if (key == "robot.width_in") sc.robot.width_in = parse_double(key, value);
  else if (key == "furnace.port_opening_in") sc.furnace_port_opening_in = parse_double(key, value);
  else if (key == "start.position_mm") sc.start_position_mm = parse_double(key, value);
  else if (key == "start.arm_angle_deg") sc.start_arm_angle_deg = parse_int(key, value);
  else if (key.rfind("stations.", 0) == 0) {
    const std::string_view rest = std::string_view(key).substr(9);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) throw ConfigError(key, "unknown key");
    plant::Station& station = station_for(sc, rest.substr(0, dot), key);
    const std::string_view field = rest.substr(dot + 1);
    if (field == "position_mm") station.base_position_mm = parse_double(key, value);
    else if (field == "arm_angle_deg") station.arm_angle_deg = parse_int(key, value);
    else if (field == "tolerance_mm") station.tolerance_mm = parse_double(key, value);
    else throw ConfigError(key, "unknown key");
  } else if (key.rfind("trays.", 0) == 0) {
    const std::string_view rest = std::string_view(key).substr(6);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos || dot == 0) throw ConfigError(key, "unknown key");
    TraySpec& tray = tray_for(sc, trays_customized, rest.substr(0, dot));
    const std::string_view field = rest.substr(dot + 1);
    if (field == "mass_g") tray.mass_g = parse_double(key, value);
    else if (field == "location") tray.location = parse_location(key, value);
    else throw ConfigError(key, "unknown key");
  } else {
    throw ConfigError(key, "unknown key");
  }
}

}  // namespace

Scenario load_scenario(std::string_view text) {
  Scenario sc;
  bool trays_customized = false;

  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    const auto line_end = text.find('\n', line_start);
    std::string_view line = text.substr(
        line_start, line_end == std::string_view::npos ? text.size() - line_start
                                                       : line_end - line_start);
    line_start = line_end == std::string_view::npos ? text.size() + 1 : line_end + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "expected 'key = value'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(std::string(line), "empty key");
    if (value.empty()) throw ConfigError(key, "empty value");
    apply_key(sc, trays_customized, key, value);
  }

  validate(sc);
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("file", "cannot read scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

void validate(const Scenario& sc) {
  if (!(sc.dt_s > 0.0)) throw ConfigError("dt", "must be positive");
  if (sc.max_ticks == 0) throw ConfigError("max_ticks", "must be positive");
  if (!(sc.bake_duration_s > 0.0)) throw ConfigError("bake_duration_s", "must be positive");
  if (!(sc.motor.target_speed_mm_s > 0.0)) {
    throw ConfigError("motor.target_speed_mm_s", "must be positive");
  }
  if (sc.motor.time_constant_s < 0.0) {
    throw ConfigError("motor.time_constant_s", "must be >= 0");
  }
  if (!(sc.motor.efficiency > 0.0) || sc.motor.efficiency > 1.0) {
    throw ConfigError("motor.efficiency", "must be in (0, 1]");
  }
  if (sc.motor.drag_constant_n < 0.0) {
    throw ConfigError("motor.drag_constant_n", "must be >= 0");
  }
  if (!(sc.stepper.max_step_rate_hz > 0.0)) {
    throw ConfigError("stepper.max_step_rate_hz", "must be positive");
  }
  if (!(sc.stepper.rated_power_w > 0.0)) {
    throw ConfigError("stepper.rated_power_w", "must be positive");
  }
  if (!(sc.stepper.holding_torque_nm > 0.0)) {
    throw ConfigError("stepper.holding_torque_nm", "must be positive");
  }
  if (!(sc.gripper_coil_resistance_ohm > 0.0)) {
    throw ConfigError("gripper.coil_resistance_ohm", "must be positive");
  }
  if (sc.gripper_capture_radius_mm < 0.0) {
    throw ConfigError("gripper.capture_radius_mm", "must be >= 0");
  }
  if (sc.backlash.probability < 0.0 || sc.backlash.probability > 1.0) {
    throw ConfigError("backlash.probability", "must be in [0, 1]");
  }
  if (sc.backlash.offset_deg < 0.0) {
    throw ConfigError("backlash.offset_deg", "must be >= 0");
  }
  for (const plant::Station& station : sc.stations) {
    const std::string prefix = std::string("stations.") + plant::to_string(station.id);
    if (!logic::is_step_angle(station.arm_angle_deg)) {
      throw ConfigError(prefix + ".arm_angle_deg", "must be one of 0, 90, 180, 270");
    }
    if (station.tolerance_mm < 0.0) {
      throw ConfigError(prefix + ".tolerance_mm", "must be >= 0");
    }
  }
  if (!logic::is_step_angle(sc.start_arm_angle_deg)) {
    throw ConfigError("start.arm_angle_deg", "must be one of 0, 90, 180, 270");
  }
  bool furnace_taken = false;
  for (const TraySpec& tray : sc.trays) {
    const std::string prefix = "trays." + tray.id;
    if (tray.id.empty()) throw ConfigError("trays", "tray id must not be empty");
    if (!(tray.mass_g > 0.0)) throw ConfigError(prefix + ".mass_g", "must be positive");
    const auto matches = std::count_if(sc.trays.begin(), sc.trays.end(),
                                       [&](const TraySpec& t) { return t.id == tray.id; });
    if (matches != 1) throw ConfigError(prefix, "duplicate tray id");
    if (tray.location.kind == plant::TrayLocation::Kind::Furnace) {
      if (furnace_taken) throw ConfigError(prefix + ".location", "furnace holds one tray");
      furnace_taken = true;
    }
  }
  // Clearance: the robot must fit through the furnace port.
  if (!(sc.furnace_port_opening_in > sc.robot.width_in)) {
    throw ConfigError("furnace.port_opening_in", "must exceed robot.width_in");
  }
  if (sc.robot.length_in <= 0 || sc.robot.height_in <= 0 || sc.robot.width_in <= 0) {
    throw ConfigError("robot", "dimensions must be positive");
  }
  if (sc.watchdog_ticks && *sc.watchdog_ticks == 0) {
    throw ConfigError("watchdog_ticks", "must be positive");
  }
}

std::uint32_t derived_watchdog_ticks(const Scenario& sc) {
  const double travel_mm =
      std::abs(sc.stations[1].base_position_mm - sc.stations[0].base_position_mm);
  const double travel_s = travel_mm / sc.motor.target_speed_mm_s;
  const double align_s = 2.0 / sc.stepper.max_step_rate_hz;
  const double longest_s = std::max({sc.bake_duration_s, travel_s, align_s, 1.0});
  const double ticks = std::ceil(10.0 * longest_s / sc.dt_s);
  return static_cast<std::uint32_t>(std::max(ticks, 100.0));
}

plant::World make_world(const Scenario& sc) {
  plant::World world;
  world.base.position_mm = sc.start_position_mm;
  world.arm_detent_deg = sc.start_arm_angle_deg;
  world.gripper.capture_radius_mm = sc.gripper_capture_radius_mm;
  world.furnace.bake_duration_s = sc.bake_duration_s;
  world.stations = sc.stations;
  world.rng_state = sc.backlash_seed;
  world.params.motor = sc.motor;
  world.params.stepper = sc.stepper;
  world.params.gripper_coil_resistance_ohm = sc.gripper_coil_resistance_ohm;
  world.params.backlash = sc.backlash;
  for (const TraySpec& spec : sc.trays) {
    plant::Tray tray{spec.id, spec.mass_g, plant::BakePhase::Unbaked, 0.0, spec.location};
    if (spec.location.kind == plant::TrayLocation::Kind::Furnace) {
      world.furnace.occupant = spec.id;
      tray.bake = plant::BakePhase::Baking;
    }
    world.trays.push_back(std::move(tray));
  }
  return world;
}

control::ControllerConfig make_controller_config(const Scenario& sc) {
  control::ControllerConfig config;
  config.pick_station = plant::StationId::Table;
  config.place_station = plant::StationId::FurnacePort;
  config.pick_arm_angle_deg =
      sc.stations[plant::station_index(plant::StationId::Table)].arm_angle_deg;
  config.place_arm_angle_deg =
      sc.stations[plant::station_index(plant::StationId::FurnacePort)].arm_angle_deg;
  config.watchdog_ticks = sc.watchdog_ticks ? *sc.watchdog_ticks : derived_watchdog_ticks(sc);
  return config;
}

}  // namespace traybot::sim
