#include "traybot/trace.hpp"

#include <cstdio>
#include <map>

#include <json.hpp>

namespace traybot::sim {

namespace {

void append_escaped(std::string& out, std::string_view text) {
  out.push_back('"');
  for (const char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

void append_field(std::string& out, std::string_view key, std::string_view raw) {
  out.push_back(',');
  append_escaped(out, key);
  out.push_back(':');
  out += raw;
}

void append_string_field(std::string& out, std::string_view key, std::string_view value) {
  std::string quoted;
  append_escaped(quoted, value);
  append_field(out, key, quoted);
}

struct PayloadWriter {
  std::string& out;

  void operator()(const StateChangeEvent& e) const {
    append_string_field(out, "kind", "StateChange");
    if (e.old_state) {
      append_string_field(out, "old", control::to_string(*e.old_state));
    } else {
      append_field(out, "old", "null");
    }
    append_string_field(out, "new", control::to_string(e.new_state));
  }

  void operator()(const CommandEvent& e) const {
    append_string_field(out, "kind", "Command");
    append_field(out, "hbridge.a", std::to_string(logic::to_bit(e.command.hbridge.a)));
    append_field(out, "hbridge.b", std::to_string(logic::to_bit(e.command.hbridge.b)));
    const char* step = "none";
    if (e.command.step_request) {
      step = *e.command.step_request == logic::StepDirection::Clockwise ? "cw" : "ccw";
    }
    append_string_field(out, "step", step);
    append_field(out, "gripper_volts", format_fixed6(e.command.gripper_volts));
  }

  void operator()(const PickEvent& e) const {
    append_string_field(out, "kind", "Pick");
    append_string_field(out, "tray", e.tray);
    append_string_field(out, "source", e.source);
  }

  void operator()(const ReleaseEvent& e) const {
    append_string_field(out, "kind", "Release");
    append_string_field(out, "tray", e.tray);
    append_string_field(out, "target", e.target);
  }

  void operator()(const BakeDoneEvent& e) const {
    append_string_field(out, "kind", "BakeDone");
    append_string_field(out, "tray", e.tray);
  }

  void operator()(const DroppedTrayEvent& e) const {
    append_string_field(out, "kind", "DroppedTray");
    append_string_field(out, "tray", e.tray);
    append_field(out, "position_mm", format_fixed6(e.position_mm));
  }

  void operator()(const FaultEvent& e) const {
    append_string_field(out, "kind", "Fault");
    append_string_field(out, "reason", control::to_string(e.reason));
  }

  void operator()(const EnergySampleEvent& e) const {
    append_string_field(out, "kind", "EnergySample");
    append_field(out, "base_j", format_fixed6(e.base_j));
    append_field(out, "stepper_j", format_fixed6(e.stepper_j));
    append_field(out, "gripper_j", format_fixed6(e.gripper_j));
    append_field(out, "total_j", format_fixed6(e.total_j));
  }
};

std::uint64_t tick_of(const nlohmann::json& object) {
  if (object.is_object() && object.contains("tick") && object["tick"].is_number_unsigned()) {
    return object["tick"].get<std::uint64_t>();
  }
  return 0;
}

bool values_equal(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number() && b.is_number()) {
    return a.get<double>() == b.get<double>();
  }
  return a == b;
}

}  // namespace

std::string format_fixed6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::string to_jsonl(const TraceEvent& event) {
  std::string out = "{\"tick\":" + std::to_string(event.tick);
  append_field(out, "clock", format_fixed6(event.clock_s));
  std::visit(PayloadWriter{out}, event.payload);
  out.push_back('}');
  return out;
}

std::vector<std::string> trace_lines(std::span<const TraceEvent> events) {
  std::vector<std::string> lines;
  lines.reserve(events.size());
  for (const TraceEvent& event : events) {
    lines.push_back(to_jsonl(event));
  }
  return lines;
}

std::optional<FirstDivergence> compare_traces(std::span<const std::string> actual,
                                              std::span<const std::string> golden) {
  const std::size_t common = std::min(actual.size(), golden.size());
  for (std::size_t i = 0; i < common; ++i) {
    nlohmann::json a = nlohmann::json::parse(actual[i], nullptr, false);
    nlohmann::json g = nlohmann::json::parse(golden[i], nullptr, false);
    if (a.is_discarded() || g.is_discarded() || !a.is_object() || !g.is_object()) {
      return FirstDivergence{tick_of(a.is_discarded() ? g : a), "json"};
    }
    // Sorted union of keys, so the reported field is deterministic.
    std::map<std::string, int> keys;
    for (const auto& item : a.items()) keys[item.key()] = 0;
    for (const auto& item : g.items()) keys[item.key()] = 0;
    for (const auto& [key, unused] : keys) {
      (void)unused;
      if (!a.contains(key) || !g.contains(key) || !values_equal(a[key], g[key])) {
        return FirstDivergence{tick_of(g), key};
      }
    }
  }
  if (actual.size() != golden.size()) {
    const auto& extra = actual.size() > golden.size() ? actual[common] : golden[common];
    nlohmann::json parsed = nlohmann::json::parse(extra, nullptr, false);
    return FirstDivergence{tick_of(parsed), "length"};
  }
  return std::nullopt;
}

}  // namespace traybot::sim
