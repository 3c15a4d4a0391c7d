#pragma once

// Golden replays: each scenario is a fixture directory
// `<name>/{topology,initial,script,expected}` in the plain-text formats of
// the topology/core/engine modules. Replay runs the script through the
// engine and checks every step's fired rules and clock vector against the
// expected trace, so transcription stays auditable in the fixtures rather
// than in code.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "unison/engine.hpp"

namespace unison {

struct Scenario {
  std::string name;
  Graph graph;
  Configuration initial;
  std::vector<std::set<ProcessorId>> script;
  Trace expected;
};

struct ScenarioReport {
  std::string name;
  bool pass = false;
  std::optional<size_t> failed_step;
  std::optional<ProcessorId> failed_processor;
  std::string message;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string default_scenario_dir() {
  if (const char* env = std::getenv("UNISON_LAB_SCENARIOS")) return env;
#ifdef UNISON_SCENARIO_DIR
  return UNISON_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

inline Scenario load_scenario(const std::string& name, const std::string& dir = default_scenario_dir()) {
  namespace fs = std::filesystem;
  fs::path base = fs::path(dir) / name;
  if (!fs::is_directory(base)) throw ScenarioError("unknown scenario '" + name + "'");
  auto open = [&](const char* file) {
    std::ifstream in(base / file);
    if (!in) throw ScenarioError("scenario '" + name + "' is missing its " + file + " file");
    return in;
  };
  auto topo_in = open("topology");
  Graph g = read_graph(topo_in);

  auto init_in = open("initial");
  std::string literal, line;
  while (std::getline(init_in, line)) {
    auto payload = text::strip_comment(line);
    if (!payload.empty()) { literal = std::string(payload); break; }
  }
  Configuration initial = parse_configuration(literal);

  auto script_in = open("script");
  auto script = read_script(script_in);

  auto expected_in = open("expected");
  Trace expected = read_trace(expected_in);

  // The expected trace carries its own topology descriptor; the topology
  // file is the readable reference and must agree with it.
  Graph graph = expected.topology.empty() ? std::move(g) : make_graph(expected.topology);
  if (!expected.topology.empty() && (graph.n() != g.n() || graph.edges() != g.edges()))
    throw ScenarioError("scenario '" + name + "': topology file disagrees with the descriptor '" +
                        expected.topology + "'");
  return Scenario{name, std::move(graph), std::move(initial), std::move(script), std::move(expected)};
}

inline std::vector<std::string> list_scenarios(const std::string& dir = default_scenario_dir()) {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / "expected"))
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

inline ScenarioReport replay(const Scenario& s, const DecisionFn& decide = uftss_decide) {
  ScenarioReport report{s.name, false, std::nullopt, std::nullopt, ""};

  CrashPlan plan;
  for (ProcessorId p : s.initial.crashed) plan.events.emplace_back(p, 0);

  ScriptedPolicy policy{s.script, "script"};
  RunOptions opts;
  opts.daemon = parse_daemon(s.expected.daemon);
  opts.max_steps = std::max<uint64_t>(s.script.size(), s.expected.steps.size() + 1);
  Configuration start = s.initial;
  start.crashed.clear();

  Trace actual;
  try {
    actual = run(s.graph, start, policy, plan, opts, decide);
  } catch (const ScriptViolation& e) {
    report.failed_step = e.step();
    report.message = e.what();
    return report;
  }

  if (actual.steps.size() != s.expected.steps.size()) {
    report.failed_step = std::min(actual.steps.size(), s.expected.steps.size()) + 1;
    report.message = "expected " + std::to_string(s.expected.steps.size()) + " steps, got " +
                     std::to_string(actual.steps.size());
    return report;
  }
  for (size_t i = 0; i < actual.steps.size(); ++i) {
    const Step& got = actual.steps[i];
    const Step& want = s.expected.steps[i];
    if (got.fired != want.fired) {
      report.failed_step = i + 1;
      for (auto [p, r] : want.fired)
        if (!got.fired.count(p) || got.fired.at(p) != r) { report.failed_processor = p; break; }
      if (!report.failed_processor && !got.fired.empty())
        report.failed_processor = got.fired.begin()->first;
      report.message = "fired rules differ at step " + std::to_string(i + 1);
      return report;
    }
    if (got.clocks_after != want.clocks_after) {
      report.failed_step = i + 1;
      for (ProcessorId p = 0; p < s.graph.n(); ++p)
        if (got.clocks_after[p] != want.clocks_after[p]) { report.failed_processor = p; break; }
      report.message = "clocks differ at step " + std::to_string(i + 1);
      return report;
    }
    if (got.gamma1_after != want.gamma1_after) {
      report.failed_step = i + 1;
      report.message = "gamma-1 flag differs at step " + std::to_string(i + 1);
      return report;
    }
  }
  if (actual.status != s.expected.status) {
    report.message = std::string("run status '") + run_status_name(actual.status) +
                     "' does not match expected '" + run_status_name(s.expected.status) + "'";
    return report;
  }
  if (s.expected.lasso_start) {
    actual.lasso_start = s.expected.lasso_start;
    FairnessVerdict v;
    try {
      v = classify_lasso(s.graph, actual, *s.expected.lasso_start, decide);
    } catch (const LassoError& e) {
      report.message = e.what();
      return report;
    }
    if (!v.strongly_fair_admissible) {
      report.message = "cycle is not strongly-fair admissible";
      return report;
    }
  }
  report.pass = true;
  return report;
}

inline ScenarioReport replay(const std::string& name, const std::string& dir = default_scenario_dir(),
                             const DecisionFn& decide = uftss_decide) {
  return replay(load_scenario(name, dir), decide);
}

}  // namespace unison
