#include "traybot/sim.hpp"

#include <fstream>
#include <ostream>
#include <utility>

namespace traybot::sim {

namespace {

constexpr std::uint64_t kEnergySampleEveryTicks = 100;

EnergySampleEvent sample_ledger(const motors::EnergyLedger& ledger) {
  return {ledger.base_j(), ledger.stepper_j(), ledger.gripper_j(), ledger.total_j()};
}

std::string release_target(const plant::TrayLocation& location) {
  if (location.kind == plant::TrayLocation::Kind::Furnace) return "furnace";
  return plant::to_string(location.station);
}

}  // namespace

const char* to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Done: return "Done";
    case Outcome::Fault: return "Fault";
    case Outcome::TickLimit: break;
  }
  return "TickLimit";
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  plant::World world = make_world(scenario);
  const control::ControllerConfig config = make_controller_config(scenario);

  RunResult result;
  control::ControllerStatus status;
  result.trace.push_back({0, 0.0, StateChangeEvent{std::nullopt, status.state}});

  std::optional<plant::ActuatorCommand> last_command;
  Outcome outcome = Outcome::TickLimit;

  std::uint64_t tick = 0;
  for (; tick < scenario.max_ticks; ++tick) {
    const plant::SensorFrame frame = plant::sense(world);

    if (tick % kEnergySampleEveryTicks == 0) {
      result.trace.push_back({tick, frame.clock_s, sample_ledger(world.ledger)});
    }

    const control::MissionState previous = status.state;
    const control::ControlStep step = control::controller_tick(status, frame, config);
    status = step.status;

    if (status.state != previous) {
      result.trace.push_back({tick, frame.clock_s, StateChangeEvent{previous, status.state}});
      if (status.state == control::MissionState::Fault) {
        result.trace.push_back({tick, frame.clock_s, FaultEvent{status.fault}});
      }
    }
    if (!last_command || !(*last_command == step.command)) {
      result.trace.push_back({tick, frame.clock_s, CommandEvent{step.command}});
      last_command = step.command;
    }

    const TickRecord record{tick, frame, status, step.command};
    if (options.record) {
      result.record.push_back(record);
    }

    if (status.state == control::MissionState::Done ||
        status.state == control::MissionState::Fault) {
      outcome = status.state == control::MissionState::Done ? Outcome::Done : Outcome::Fault;
      break;  // mission over; the final command is all-quiet
    }

    plant::TickResult ticked = plant::plant_tick(world, step.command, scenario.dt_s);
    if (options.observer) {
      options.observer(world, record, ticked.world);
    }
    world = std::move(ticked.world);

    const plant::TickEvents& events = ticked.events;
    if (events.picked_tray) {
      const std::string source = events.pick_from_furnace
                                     ? "furnace"
                                     : plant::to_string(*events.pick_station);
      result.trace.push_back({tick, frame.clock_s, PickEvent{*events.picked_tray, source}});
    }
    if (events.released_tray) {
      if (events.release_location->kind == plant::TrayLocation::Kind::Dropped) {
        result.trace.push_back(
            {tick, frame.clock_s,
             DroppedTrayEvent{*events.released_tray,
                              events.release_location->dropped_position_mm}});
      } else {
        result.trace.push_back(
            {tick, frame.clock_s,
             ReleaseEvent{*events.released_tray, release_target(*events.release_location)}});
      }
    }
    if (events.bake_done_tray) {
      result.trace.push_back({tick, frame.clock_s, BakeDoneEvent{*events.bake_done_tray}});
    }
  }

  result.outcome = outcome;
  result.fault_reason = status.fault;
  result.ticks = tick;
  result.clock_s = world.clock_s;
  result.world = std::move(world);
  return result;
}

void write_trace(std::span<const TraceEvent> events, std::ostream& out) {
  for (const TraceEvent& event : events) {
    out << to_jsonl(event) << '\n';
  }
}

void write_trace_file(std::span<const TraceEvent> events, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open trace file for writing: " + path.string());
  }
  write_trace(events, out);
}

std::vector<std::string> read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read trace file: " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

namespace {

struct HBridgeRow {
  int a;
  int b;
  logic::DriveCommand expected;
};

struct PhaseRow {
  int x;
  int x_bar;
  int y;
  int y_bar;
  int angle_deg;
};

// Row order mirrors the drive-circuit documentation.
constexpr std::array<HBridgeRow, 4> kHBridgeRows{{
    {1, 0, logic::DriveCommand::Forward},
    {0, 1, logic::DriveCommand::Reverse},
    {1, 1, logic::DriveCommand::Stop},
    {0, 0, logic::DriveCommand::Stop},
}};

constexpr std::array<PhaseRow, 4> kPhaseRows{{
    {0, 1, 0, 1, 0},
    {1, 0, 0, 1, 90},
    {1, 0, 1, 0, 180},
    {0, 1, 1, 0, 270},
}};

}  // namespace

int validate_tables(std::ostream& out) {
  bool ok = true;
  const auto fail = [&](const char* what) {
    out << "self-test FAILED: " << what << '\n';
    ok = false;
  };

  out << "H-bridge drive logic (A B -> function)\n";
  for (const HBridgeRow& row : kHBridgeRows) {
    const logic::HBridgeInput input{logic::level_from_bit(row.a), logic::level_from_bit(row.b)};
    const logic::DriveCommand decoded = logic::decode_hbridge(input);
    out << "  " << row.a << ' ' << row.b << "  " << logic::to_string(decoded) << '\n';
    if (decoded != row.expected) fail("H-bridge row decodes wrong");
  }

  out << "stepper drive logic (X X' Y Y' -> step angle)\n";
  for (const PhaseRow& row : kPhaseRows) {
    const auto phase =
        logic::StepperPhase::from_lines(logic::level_from_bit(row.x), logic::level_from_bit(row.x_bar),
                                        logic::level_from_bit(row.y), logic::level_from_bit(row.y_bar));
    const int angle = logic::angle_for_phase(phase);
    out << "  " << row.x << ' ' << row.x_bar << ' ' << row.y << ' ' << row.y_bar << "  "
        << angle << " deg\n";
    if (angle != row.angle_deg) fail("stepper row decodes wrong");
    if (!(logic::phase_for_angle(row.angle_deg) == phase)) fail("stepper angle lookup wrong");
  }

  // Codec self checks beyond the printed rows.
  for (const logic::DriveCommand command :
       {logic::DriveCommand::Forward, logic::DriveCommand::Reverse, logic::DriveCommand::Stop}) {
    if (logic::decode_hbridge(logic::encode_drive(command)) != command) {
      fail("encode/decode round trip broken");
    }
  }
  const logic::HBridgeInput stop = logic::encode_drive(logic::DriveCommand::Stop);
  if (logic::to_bit(stop.a) != 0 || logic::to_bit(stop.b) != 0) {
    fail("canonical stop must be (0,0)");
  }
  for (const int angle : logic::kStepAngles) {
    if (logic::angle_for_phase(logic::phase_for_angle(angle)) != angle) {
      fail("phase/angle bijection broken");
    }
  }
  auto phase = logic::phase_for_angle(0);
  for (int i = 0; i < 4; ++i) {
    phase = logic::next_phase(phase, logic::StepDirection::Clockwise);
  }
  if (!(phase == logic::phase_for_angle(0))) fail("clockwise cycle is not period 4");
  if (!(logic::next_phase(logic::next_phase(phase, logic::StepDirection::Clockwise),
                          logic::StepDirection::CounterClockwise) == phase)) {
    fail("counter-clockwise does not invert clockwise");
  }
  if (!logic::check_buffer_voltage(logic::BufferVoltage(12.0)).ok ||
      !logic::check_buffer_voltage(logic::BufferVoltage(15.0)).ok ||
      logic::check_buffer_voltage(logic::BufferVoltage(15.000001)).ok) {
    fail("buffer voltage guard boundary wrong");
  }

  out << (ok ? "self-test: ok" : "self-test: FAILED") << '\n';
  return ok ? 0 : 1;
}

}  // namespace traybot::sim
