#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "traybot/scenario.hpp"
#include "traybot/trace.hpp"

// Fixed-step simulation loop wiring the controller to the plant, plus trace
// file IO and the logic-table self check behind `validate-tables`.

namespace traybot::sim {

enum class Outcome { Done, Fault, TickLimit };

const char* to_string(Outcome outcome) noexcept;

/// One sense -> decide -> actuate record, kept when RunOptions::record is set.
struct TickRecord {
  std::uint64_t tick = 0;
  plant::SensorFrame frame;
  control::ControllerStatus status;  ///< status after this tick's transition
  plant::ActuatorCommand command;
};

struct RunResult {
  Outcome outcome = Outcome::TickLimit;
  control::FaultReason fault_reason = control::FaultReason::None;
  std::vector<TraceEvent> trace;
  std::uint64_t ticks = 0;
  double clock_s = 0.0;
  plant::World world;  ///< final plant state
  std::vector<TickRecord> record;
};

struct RunOptions {
  bool record = false;
  /// Called after every plant tick with the pre-tick world, the tick record,
  /// and the post-tick world. Test hook; never used by the CLI.
  std::function<void(const plant::World&, const TickRecord&, const plant::World&)> observer;
};

/// Simulate a scenario to Done, Fault, or the tick limit. Bit-for-bit
/// deterministic for a fixed scenario, seed included.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

void write_trace(std::span<const TraceEvent> events, std::ostream& out);
void write_trace_file(std::span<const TraceEvent> events, const std::filesystem::path& path);

/// Trace file lines, without newlines. Throws std::runtime_error on IO error.
std::vector<std::string> read_trace_file(const std::filesystem::path& path);

/// Print both drive-logic tables and run the codec self checks.
/// Returns 0 when every check passes, 1 otherwise.
int validate_tables(std::ostream& out);

}  // namespace traybot::sim
