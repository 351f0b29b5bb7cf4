#include "traybot/plant.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "traybot/splitmix64.hpp"

namespace traybot::plant {

namespace {

constexpr double kBakeSlackS = 1e-9;  // tolerates dt-accumulation noise

bool pose_matches(const World& world, const Station& station) {
  return std::abs(world.base.position_mm - station.base_position_mm) <= station.tolerance_mm &&
         world.arm_angle_deg() == static_cast<double>(station.arm_angle_deg);
}

bool within_capture(const World& world, const Station& station) {
  return std::abs(world.base.position_mm - station.base_position_mm) <=
         world.gripper.capture_radius_mm;
}

struct Candidate {
  std::string id;
  bool from_furnace;
  StationId station;
};

// Trays the magnet could reach at the current pose. Deterministic order:
// the furnace occupant first (at the furnace port), then station trays by id.
std::vector<Candidate> capture_candidates(const World& world) {
  std::vector<Candidate> out;
  for (const Station& station : world.stations) {
    if (!pose_matches(world, station) || !within_capture(world, station)) {
      continue;
    }
    if (station.id == StationId::FurnacePort && world.furnace.occupant) {
      out.push_back({*world.furnace.occupant, true, station.id});
    }
    std::vector<const Tray*> here;
    for (const Tray& tray : world.trays) {
      if (tray.location == TrayLocation::at_station(station.id)) {
        here.push_back(&tray);
      }
    }
    std::sort(here.begin(), here.end(),
              [](const Tray* a, const Tray* b) { return a->id < b->id; });
    for (const Tray* tray : here) {
      out.push_back({tray->id, false, station.id});
    }
  }
  return out;
}

// Coil already energized, gripper known empty.
PickResult attempt_pick(World world) {
  const auto candidates = capture_candidates(world);
  if (candidates.empty()) {
    PickResult result{std::move(world), {}, PickFailure::NothingThere, false, {}};
    return result;
  }
  const Candidate& pick = candidates.front();
  Tray* tray = world.find_tray(pick.id);
  if (tray->mass_g > kPayloadLimitGrams) {
    // Magnet too weak to lift; the tray stays put and the coil stays on.
    PickResult result{std::move(world), {}, PickFailure::Overload, false, {}};
    return result;
  }
  if (pick.from_furnace) {
    world.furnace.occupant.reset();
  }
  tray->location = TrayLocation::in_gripper();
  world.gripper.holding = tray->id;
  PickResult result{std::move(world), pick.id, {}, pick.from_furnace, {}};
  if (!pick.from_furnace) {
    result.source_station = pick.station;
  }
  return result;
}

// Next detent strictly in the commanded direction from the actual angle.
// Seated arms get the plain +-90; an off-detent arm (backlash landing)
// re-seats on the adjacent detent toward the target, which is what lets the
// controller converge by stepping toward its goal.
int next_detent(double actual_deg, logic::StepDirection direction) {
  const double quotient = actual_deg / 90.0;
  const double index = direction == logic::StepDirection::Clockwise
                           ? std::floor(quotient) + 1.0
                           : std::ceil(quotient) - 1.0;
  int detent = static_cast<int>(index) * 90 % 360;
  if (detent < 0) {
    detent += 360;
  }
  return detent;
}

}  // namespace

const Tray* World::find_tray(std::string_view id) const noexcept {
  for (const Tray& tray : trays) {
    if (tray.id == id) return &tray;
  }
  return nullptr;
}

Tray* World::find_tray(std::string_view id) noexcept {
  for (Tray& tray : trays) {
    if (tray.id == id) return &tray;
  }
  return nullptr;
}

bool furnace_done_signal(const World& world) noexcept {
  if (!world.furnace.occupant) {
    return false;
  }
  const Tray* tray = world.find_tray(*world.furnace.occupant);
  return tray != nullptr &&
         tray->bake_elapsed_s + kBakeSlackS >= world.furnace.bake_duration_s;
}

SensorFrame sense(const World& world) noexcept {
  SensorFrame frame;
  for (std::size_t i = 0; i < kStationCount; ++i) {
    const Station& station = world.stations[i];
    frame.at_station[i] =
        std::abs(world.base.position_mm - station.base_position_mm) <= station.tolerance_mm;
  }
  frame.arm_angle_deg = world.arm_angle_deg();
  frame.holding = world.gripper.holding.has_value();
  frame.furnace_done = furnace_done_signal(world);
  frame.clock_s = world.clock_s;
  return frame;
}

PickResult gripper_energize(World world) {
  if (world.gripper.holding) {
    throw std::logic_error("gripper_energize: gripper already holding a tray");
  }
  world.gripper.coil_volts = kGripperNominalVolts;
  return attempt_pick(std::move(world));
}

ReleaseResult gripper_release(World world) {
  world.gripper.coil_volts = 0.0;
  if (!world.gripper.holding) {
    return {std::move(world), {}, {}};
  }

  Tray* tray = world.find_tray(*world.gripper.holding);
  const Station* match = nullptr;
  for (const Station& station : world.stations) {
    if (pose_matches(world, station)) {
      match = &station;
      break;
    }
  }

  TrayLocation placed = TrayLocation::dropped(world.base.position_mm);
  if (match != nullptr) {
    if (match->id == StationId::FurnacePort) {
      // Single-occupant furnace: releasing at an occupied port drops the tray.
      if (!world.furnace.occupant) {
        world.furnace.occupant = tray->id;
        if (tray->bake == BakePhase::Unbaked) {
          tray->bake = BakePhase::Baking;
          tray->bake_elapsed_s = 0.0;
        }
        placed = TrayLocation::in_furnace();
      }
    } else {
      placed = TrayLocation::at_station(match->id);
    }
  }

  tray->location = placed;
  const std::string released = tray->id;
  world.gripper.holding.reset();
  return {std::move(world), released, placed};
}

double apply_backlash(const BacklashModel& model, std::uint64_t& rng_state) noexcept {
  if (!model.enabled) {
    return 0.0;
  }
  SplitMix64 rng(rng_state);
  double offset = 0.0;
  if (rng.next_double() >= model.probability) {
    offset = rng.next_double() < 0.5 ? model.offset_deg : -model.offset_deg;
  }
  rng_state = rng.state();
  return offset;
}

TickResult plant_tick(World world, const ActuatorCommand& command, double dt_s) {
  if (!(dt_s > 0.0)) {
    throw InvalidTimestep("dt must be > 0");
  }
  const auto coil_check = logic::check_buffer_voltage(logic::BufferVoltage(command.gripper_volts));
  if (!coil_check.ok) {
    throw OverVoltageError(coil_check.volts);
  }

  TickEvents events;

  // Base drive.
  const auto drive = logic::decode_hbridge(command.hbridge);
  const auto dc = motors::dc_tick(world.base.motor, world.params.motor, drive, dt_s);
  world.base.motor = dc.state;
  world.base.position_mm += dc.displacement_mm;
  world.ledger.add_base(dc.energy_j);

  const double now_s = world.clock_s + dt_s;

  // Arm: at most one detent per tick, gated by the step rate.
  if (command.step_request) {
    const auto& stepper = world.params.stepper;
    if (motors::step_interval_elapsed(world.last_step_time_s, now_s, stepper)) {
      if (world.arm_offset_deg == 0.0) {
        const auto attempt = motors::stepper_step(world.arm_detent_deg, *command.step_request,
                                                  world.last_step_time_s, now_s, stepper);
        world.arm_detent_deg = std::get<motors::StepResult>(attempt).angle_deg;
      } else {
        world.arm_detent_deg = next_detent(world.arm_angle_deg(), *command.step_request);
      }
      world.arm_offset_deg = apply_backlash(world.params.backlash, world.rng_state);
      world.last_step_time_s = now_s;
      world.ledger.add_stepper(stepper.rated_power_w / stepper.max_step_rate_hz);
      events.arm_stepped = true;
    }
  }

  // Furnace bake progress for the tick's occupant; a tray placed below
  // starts accruing next tick.
  if (world.furnace.occupant) {
    if (Tray* occupant = world.find_tray(*world.furnace.occupant)) {
      occupant->bake_elapsed_s += dt_s;
      if (occupant->bake == BakePhase::Baking &&
          occupant->bake_elapsed_s + kBakeSlackS >= world.furnace.bake_duration_s) {
        occupant->bake = BakePhase::Baked;
        events.bake_done_tray = occupant->id;
      }
    }
  }

  // Gripper, at the post-motion pose.
  if (command.gripper_volts > 0.0) {
    world.gripper.coil_volts = command.gripper_volts;
    if (!world.gripper.holding) {
      auto pick = attempt_pick(std::move(world));
      world = std::move(pick.world);
      events.picked_tray = std::move(pick.picked_tray);
      events.pick_from_furnace = pick.from_furnace;
      events.pick_station = pick.source_station;
      events.pick_failure = pick.failure;
    }
    world.ledger.add_gripper(command.gripper_volts * command.gripper_volts /
                             world.params.gripper_coil_resistance_ohm * dt_s);
  } else {
    auto release = gripper_release(std::move(world));
    world = std::move(release.world);
    events.released_tray = std::move(release.released_tray);
    events.release_location = release.placed_at;
  }

  world.clock_s = now_s;
  return {std::move(world), std::move(events)};
}

}  // namespace traybot::plant
