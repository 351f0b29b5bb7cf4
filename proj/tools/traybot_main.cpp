#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "traybot/errors.hpp"
#include "traybot/sim.hpp"

// Exit codes: 0 done/match, 1 fault, 2 tick limit, 3 config or IO error,
// 4 trace divergence.

namespace {

int run_command(const std::string& scenario_path, const std::string& trace_out,
                std::optional<std::uint64_t> seed, std::optional<std::uint64_t> max_ticks) {
  traybot::sim::Scenario scenario = traybot::sim::load_scenario_file(scenario_path);
  if (seed) {
    scenario.backlash_seed = *seed;
  }
  if (max_ticks) {
    if (*max_ticks == 0) throw traybot::ConfigError("max_ticks", "must be positive");
    scenario.max_ticks = *max_ticks;
  }

  const traybot::sim::RunResult result = traybot::sim::run(scenario);
  if (!trace_out.empty()) {
    traybot::sim::write_trace_file(result.trace, trace_out);
  }

  std::cout << "outcome=" << traybot::sim::to_string(result.outcome);
  if (result.outcome == traybot::sim::Outcome::Fault) {
    std::cout << " reason=" << traybot::control::to_string(result.fault_reason);
  }
  std::cout << " ticks=" << result.ticks
            << " clock_s=" << traybot::sim::format_fixed6(result.clock_s)
            << " events=" << result.trace.size();
  if (!trace_out.empty()) {
    std::cout << " trace=" << trace_out;
  }
  std::cout << '\n';

  switch (result.outcome) {
    case traybot::sim::Outcome::Done: return 0;
    case traybot::sim::Outcome::Fault: return 1;
    case traybot::sim::Outcome::TickLimit: break;
  }
  return 2;
}

int compare_command(const std::string& actual_path, const std::string& golden_path) {
  const auto actual = traybot::sim::read_trace_file(actual_path);
  const auto golden = traybot::sim::read_trace_file(golden_path);
  const auto divergence = traybot::sim::compare_traces(actual, golden);
  if (!divergence) {
    std::cout << "match (" << actual.size() << " events)\n";
    return 0;
  }
  std::cout << "divergence at tick " << divergence->tick << " field " << divergence->field
            << '\n';
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pick-and-place tray robot simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string trace_out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> max_ticks;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and emit a JSONL event trace");
  run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--trace-out", trace_out, "write the event trace to this path");
  run_cmd->add_option("--seed", seed, "override backlash.seed");
  run_cmd->add_option("--max-ticks", max_ticks, "override max_ticks");

  auto* tables_cmd =
      app.add_subcommand("validate-tables", "print the drive logic tables and self-test them");

  std::string actual_path;
  std::string golden_path;
  auto* compare_cmd = app.add_subcommand("compare", "compare a trace against a golden trace");
  compare_cmd->add_option("--actual", actual_path, "trace under test")->required();
  compare_cmd->add_option("--golden", golden_path, "reference trace")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return run_command(scenario_path, trace_out, seed, max_ticks);
    }
    if (tables_cmd->parsed()) {
      return traybot::sim::validate_tables(std::cout);
    }
    if (compare_cmd->parsed()) {
      return compare_command(actual_path, golden_path);
    }
  } catch (const traybot::ConfigError& error) {
    std::cerr << "config error: " << error.what() << '\n';
    return 3;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 3;
  }
  return 3;
}
