#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "traybot/sim.hpp"

using namespace traybot;
using control::MissionState;
using sim::Outcome;
using sim::RunOptions;
using sim::RunResult;
using sim::Scenario;
using sim::TraceEvent;

namespace {

#ifndef TRAYBOT_REPO_DIR
#define TRAYBOT_REPO_DIR "."
#endif

Scenario default_scenario() {
  return sim::load_scenario_file(std::string(TRAYBOT_REPO_DIR) + "/scenarios/default.scn");
}

struct StateChangeRecord {
  std::uint64_t tick;
  MissionState state;
};

std::vector<StateChangeRecord> state_changes(const std::vector<TraceEvent>& trace) {
  std::vector<StateChangeRecord> out;
  for (const TraceEvent& event : trace) {
    if (const auto* change = std::get_if<sim::StateChangeEvent>(&event.payload)) {
      out.push_back({event.tick, change->new_state});
    }
  }
  return out;
}

const plant::Tray& only_tray(const plant::World& world) {
  REQUIRE(world.trays.size() == 1);
  return world.trays.front();
}

}  // namespace

TEST_CASE("default mission reproduces the hand-computed schedule") {
  const RunResult result = sim::run(default_scenario());
  CHECK(result.outcome == Outcome::Done);
  CHECK(result.ticks == 517);
  CHECK(result.clock_s == doctest::Approx(51.7).epsilon(1e-9));

  const plant::Tray& tray = only_tray(result.world);
  CHECK(tray.bake == plant::BakePhase::Baked);
  CHECK(tray.location == plant::TrayLocation::at_station(plant::StationId::Table));

  // Hand-summed phase schedule: one immediate alignment step, 10 s outbound
  // travel, two rate-limited alignment steps, 30 s bake, 10 s return, two
  // more alignment steps, one-tick settle after each pick/release.
  const std::vector<StateChangeRecord> expected{
      {0, MissionState::Idle},
      {0, MissionState::AlignArmToTable},
      {1, MissionState::PickFromTable},
      {2, MissionState::TransportToFurnace},
      {102, MissionState::AlignArmToFurnace},
      {108, MissionState::PlaceInFurnace},
      {109, MissionState::WaitBake},
      {409, MissionState::RetrieveFromFurnace},
      {410, MissionState::TransportToTable},
      {510, MissionState::AlignArmToTableReturn},
      {516, MissionState::PlaceOnTable},
      {517, MissionState::Done},
  };
  const auto actual = state_changes(result.trace);
  REQUIRE(actual.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CAPTURE(i);
    CHECK(actual[i].tick == expected[i].tick);
    CHECK(actual[i].state == expected[i].state);
  }
}

TEST_CASE("plant-level events land on their scheduled ticks") {
  const RunResult result = sim::run(default_scenario());

  std::vector<std::uint64_t> picks;
  std::vector<std::uint64_t> releases;
  std::vector<std::uint64_t> bakes;
  std::vector<std::uint64_t> samples;
  for (const TraceEvent& event : result.trace) {
    if (std::holds_alternative<sim::PickEvent>(event.payload)) picks.push_back(event.tick);
    if (std::holds_alternative<sim::ReleaseEvent>(event.payload)) releases.push_back(event.tick);
    if (std::holds_alternative<sim::BakeDoneEvent>(event.payload)) bakes.push_back(event.tick);
    if (std::holds_alternative<sim::EnergySampleEvent>(event.payload)) samples.push_back(event.tick);
  }
  CHECK(picks == std::vector<std::uint64_t>{1, 409});
  CHECK(releases == std::vector<std::uint64_t>{108, 516});
  CHECK(bakes == std::vector<std::uint64_t>{408});
  CHECK(samples == std::vector<std::uint64_t>{0, 100, 200, 300, 400, 500});
}

TEST_CASE("trace ticks never decrease and energy samples never shrink") {
  const RunResult result = sim::run(default_scenario());
  std::uint64_t last_tick = 0;
  double last_total = 0.0;
  for (const TraceEvent& event : result.trace) {
    CHECK(event.tick >= last_tick);
    last_tick = event.tick;
    if (const auto* sample = std::get_if<sim::EnergySampleEvent>(&event.payload)) {
      CHECK(sample->total_j >= last_total);
      CHECK(sample->total_j ==
            doctest::Approx(sample->base_j + sample->stepper_j + sample->gripper_j));
      last_total = sample->total_j;
    }
  }
}

TEST_CASE("two runs of the same scenario are byte-identical") {
  const Scenario scenario = default_scenario();
  const auto first = sim::trace_lines(sim::run(scenario).trace);
  const auto second = sim::trace_lines(sim::run(scenario).trace);
  REQUIRE(first.size() == second.size());
  CHECK(first == second);
}

TEST_CASE("an overweight tray faults the mission at the pick watchdog") {
  Scenario scenario = default_scenario();
  scenario.trays[0].mass_g = 250.0;
  const RunResult result = sim::run(scenario);
  CHECK(result.outcome == Outcome::Fault);
  CHECK(result.fault_reason == control::FaultReason::PickFailed);
  CHECK(only_tray(result.world).location ==
        plant::TrayLocation::at_station(plant::StationId::Table));

  bool saw_fault_event = false;
  for (const TraceEvent& event : result.trace) {
    if (const auto* fault = std::get_if<sim::FaultEvent>(&event.payload)) {
      saw_fault_event = true;
      CHECK(fault->reason == control::FaultReason::PickFailed);
    }
  }
  CHECK(saw_fault_event);
}

TEST_CASE("a short tick budget ends at TickLimit") {
  Scenario scenario = default_scenario();
  scenario.max_ticks = 50;
  const RunResult result = sim::run(scenario);
  CHECK(result.outcome == Outcome::TickLimit);
  CHECK(result.ticks == 50);
  // Even a truncated run logs at least the initial state.
  CHECK_FALSE(state_changes(result.trace).empty());
}

TEST_CASE("halving dt preserves the state path and phase durations") {
  const Scenario coarse = default_scenario();
  Scenario fine = coarse;
  fine.dt_s = 0.05;

  const auto coarse_changes = state_changes(sim::run(coarse).trace);
  const auto fine_changes = state_changes(sim::run(fine).trace);

  REQUIRE(coarse_changes.size() == fine_changes.size());
  for (std::size_t i = 0; i < coarse_changes.size(); ++i) {
    CHECK(coarse_changes[i].state == fine_changes[i].state);
  }
  // Durations between consecutive transitions shift by at most one coarse
  // tick; sense-act latency scales with dt, so absolute clocks drift while
  // per-phase durations stay pinned.
  for (std::size_t i = 1; i < coarse_changes.size(); ++i) {
    const double coarse_duration =
        (coarse_changes[i].tick - coarse_changes[i - 1].tick) * coarse.dt_s;
    const double fine_duration =
        (fine_changes[i].tick - fine_changes[i - 1].tick) * fine.dt_s;
    CHECK(std::abs(coarse_duration - fine_duration) <= coarse.dt_s + 1e-9);
  }
}

TEST_CASE("recorded frames replayed through the pure controller reproduce the run") {
  const Scenario scenario = default_scenario();
  RunOptions options;
  options.record = true;
  const RunResult result = sim::run(scenario, options);
  REQUIRE_FALSE(result.record.empty());

  std::vector<plant::SensorFrame> frames;
  frames.reserve(result.record.size());
  for (const sim::TickRecord& record : result.record) {
    frames.push_back(record.frame);
  }
  const auto replay =
      control::mission_trace({}, frames, sim::make_controller_config(scenario));
  REQUIRE(replay.size() == result.record.size());
  for (std::size_t i = 0; i < replay.size(); ++i) {
    CAPTURE(i);
    CHECK(replay[i].status == result.record[i].status);
    CHECK(replay[i].command == result.record[i].command);
  }
}

TEST_CASE("the observer sees every plant tick in order") {
  Scenario scenario = default_scenario();
  scenario.max_ticks = 200;
  std::uint64_t calls = 0;
  RunOptions options;
  options.observer = [&](const plant::World& before, const sim::TickRecord& record,
                         const plant::World& after) {
    CHECK(record.tick == calls);
    CHECK(after.clock_s == doctest::Approx(before.clock_s + scenario.dt_s));
    ++calls;
  };
  const RunResult result = sim::run(scenario, options);
  CHECK(result.outcome == Outcome::TickLimit);
  CHECK(calls == 200);
}

TEST_CASE("backlash missions still finish, with extra corrective steps") {
  Scenario scenario = default_scenario();
  scenario.backlash.enabled = true;
  scenario.backlash_seed = 42;
  const RunResult result = sim::run(scenario);
  CHECK(result.outcome == Outcome::Done);
  CHECK(only_tray(result.world).bake == plant::BakePhase::Baked);
  // Seed 42 draws a +5 offset on the very first landing, so the mission must
  // take at least one corrective step beyond the nominal five.
  CHECK(result.ticks > 517);
}
