#pragma once

// Command-line surface: run / check / scenario / plotdata. Kept in a header
// as plain functions over argument vectors so the exit-code contracts are
// testable in-process; the binary is a thin main().
//
// Exit codes: 0 clean, 1 violations or replay mismatch, 2 liveness stall
// (terminal configuration with correct processors left), 64 bad usage,
// 65 illegal script step, 66 unknown scenario.

#include <atomic>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unison/checker.hpp"
#include "unison/engine.hpp"
#include "unison/scenario.hpp"

namespace unison::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitStall = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitScript = 65;
inline constexpr int kExitUnknownScenario = 66;

namespace detail {

inline Graph graph_from_flag(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    std::string path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw text::ParseError("cannot open graph file '" + path + "'");
    Graph g = read_graph(in, "graph:file");
    // Re-describe with the edge list embedded so traces replay standalone.
    return make_graph(embedded_descriptor(g));
  }
  return make_graph(spec);
}

// `--init` accepts an explicit clock list or `random:<seed>:<max>`.
inline std::vector<ClockValue> initial_clocks(const std::string& spec, uint32_t n) {
  if (spec.rfind("random:", 0) == 0) {
    auto parts = text::split(spec, ':');
    if (parts.size() != 3) throw text::ParseError("--init random takes random:<seed>:<max>");
    std::mt19937_64 rng(text::parse_u64(parts[1]));
    std::uniform_int_distribution<ClockValue> dist(0, text::parse_u64(parts[2]));
    std::vector<ClockValue> clocks(n);
    for (auto& v : clocks) v = dist(rng);
    return clocks;
  }
  auto clocks = text::parse_u64_list(spec);
  if (clocks.size() != n)
    throw text::ParseError("--init names " + std::to_string(clocks.size()) + " clocks for " +
                           std::to_string(n) + " processors");
  return clocks;
}

inline StopCondition parse_stop(const std::string& spec) {
  if (spec == "max-steps") return StopCondition::max_steps_only();
  if (spec == "gamma1") return StopCondition::gamma1_reached();
  if (spec == "terminal") return StopCondition::terminal();
  if (spec.rfind("gamma1-stable:", 0) == 0)
    return StopCondition::gamma1_stable_for(text::parse_u64(std::string_view(spec).substr(14)));
  throw text::ParseError("unknown stop condition '" + spec + "'");
}

inline bool stalled(const Graph& g, const Trace& t) {
  if (t.status != RunStatus::Terminal) return false;
  const Configuration last = t.configuration_at(t.num_configurations() - 1);
  return last.crashed.size() < g.n();
}

inline void print_metrics(std::ostream& out, const Graph& g, const Trace& t) {
  RunMetrics m = metrics(g, t);
  out << "status=" << run_status_name(t.status) << " steps=" << t.steps.size();
  if (m.steps_to_gamma1) out << " gamma1_at=" << *m.steps_to_gamma1;
  out << "\n";
  for (ProcessorId p = 0; p < g.n(); ++p) {
    const auto& pm = m.per_processor[p];
    out << "p" << p << ": executions=" << pm.executions << " increments=" << pm.increments
        << " decrements=" << pm.decrements << " neutralizations=" << pm.neutralizations;
    if (m.longest_increment_gap_after_gamma1[p])
      out << " max_gap_after_gamma1=" << *m.longest_increment_gap_after_gamma1[p];
    out << "\n";
  }
}

struct RunParams {
  std::string topology;
  std::string init;
  std::vector<std::string> crashes;
  std::string daemon = "locally-central";
  std::string policy = "lru";
  uint64_t max_steps = 1000;
  std::string stop = "max-steps";
  std::string out_path;
  std::string seeds;
};

inline int run_once(const RunParams& p, uint64_t seed_override, bool have_override,
                    std::ostream& log) {
  Graph g = graph_from_flag(p.topology);

  std::string init_spec = p.init;
  std::string policy_spec = p.policy;
  uint64_t seed = 0;
  if (init_spec.rfind("random:", 0) == 0) {
    auto parts = text::split(init_spec, ':');
    if (parts.size() == 3 && have_override)
      init_spec = "random:" + std::to_string(seed_override) + ":" + std::string(parts[2]);
    seed = text::parse_u64(text::split(init_spec, ':')[1]);
  }
  if (policy_spec.rfind("random:", 0) == 0) {
    if (have_override) policy_spec = "random:" + std::to_string(seed_override);
    if (init_spec.rfind("random:", 0) != 0)
      seed = text::parse_u64(std::string_view(policy_spec).substr(7));
  }

  Configuration c0;
  c0.clocks = initial_clocks(init_spec, g.n());

  CrashPlan plan;
  for (const auto& spec : p.crashes) {
    CrashPlan one = parse_crash_plan(spec);
    plan.events.insert(plan.events.end(), one.events.begin(), one.events.end());
  }
  plan.validate(g.n());

  auto policy = parse_policy(policy_spec);
  RunOptions opts;
  opts.daemon = parse_daemon(p.daemon);
  opts.max_steps = p.max_steps;
  opts.stop = parse_stop(p.stop);
  opts.seed = seed;

  Trace t;
  try {
    t = run(g, c0, *policy, plan, opts);
  } catch (const ScriptViolation& e) {
    log << "error: " << e.what() << "\n";
    return kExitScript;
  }

  if (!p.out_path.empty()) {
    std::string path = p.out_path;
    if (have_override) path += "." + std::to_string(seed_override);
    std::ofstream out(path);
    if (!out) {
      log << "error: cannot write '" << path << "'\n";
      return kExitUsage;
    }
    write_trace(out, t);
  }
  print_metrics(log, g, t);
  return stalled(g, t) ? kExitStall : kExitClean;
}

}  // namespace detail

inline int cmd_run(const detail::RunParams& params, std::ostream& log) {
  if (params.seeds.empty()) return detail::run_once(params, 0, false, log);

  auto dots = params.seeds.find("..");
  if (dots == std::string::npos)
    throw text::ParseError("--seeds takes a range a..b");
  uint64_t lo = text::parse_u64(std::string_view(params.seeds).substr(0, dots));
  uint64_t hi = text::parse_u64(std::string_view(params.seeds).substr(dots + 2));
  if (hi < lo) throw text::ParseError("--seeds range is reversed");

  std::vector<uint64_t> seeds;
  for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  std::vector<int> codes(seeds.size(), kExitClean);
  std::vector<std::string> logs(seeds.size());
  std::atomic<size_t> cursor{0};
  uint32_t workers = std::min<uint32_t>(worker_count(), static_cast<uint32_t>(seeds.size()));
  std::vector<std::thread> pool;
  for (uint32_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i = cursor.fetch_add(1); i < seeds.size(); i = cursor.fetch_add(1)) {
        std::ostringstream buf;
        buf << "--- seed " << seeds[i] << "\n";
        codes[i] = detail::run_once(params, seeds[i], true, buf);
        logs[i] = buf.str();
      }
    });
  for (auto& t : pool) t.join();
  int worst = kExitClean;
  for (size_t i = 0; i < seeds.size(); ++i) {
    log << logs[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

inline int cmd_check(const std::string& topology, const std::vector<ProcessorId>& crash_ids,
                     uint64_t span, const std::string& checks, bool expect_witness,
                     const std::string& report_path, const std::string& witness_dir,
                     std::ostream& log) {
  Graph g = detail::graph_from_flag(topology);
  std::set<ProcessorId> crashed(crash_ids.begin(), crash_ids.end());
  for (ProcessorId p : crashed)
    if (p >= g.n()) throw text::ParseError("--crash id out of range");

  nlohmann::json report;
  report["topology"] = g.descriptor();
  report["crashed"] = crashed;
  report["span"] = span;

  StateSpace space = build_state_space(g, crashed, span);
  report["states"] = space.states.size();
  report["transitions"] = space.transitions;
  report["boundary_transitions"] = space.boundary_transitions;

  size_t total_violations = 0;
  size_t witnesses_found = 0;
  size_t witness_files = 0;
  auto emit = [&](const std::string& name, const std::vector<Violation>& violations) {
    report["checks"][name]["violations"] = violations.size();
    total_violations += violations.size();
    log << name << ": " << violations.size() << " violation(s)\n";
    for (const auto& v : violations) {
      log << "  [" << violation_kind_name(v.kind) << "] " << v.detail << "\n";
      if (!witness_dir.empty()) {
        std::string path = witness_dir + "/witness_" + violation_kind_name(v.kind) + "_" +
                           std::to_string(witness_files++) + ".trace";
        std::ofstream out(path);
        if (out) write_trace(out, v.witness);
      }
    }
  };

  for (auto item : text::split(checks, ',')) {
    std::string name(text::trim(item));
    if (name.empty()) continue;
    if (name == "closure") emit(name, check_closure(g, crashed, span));
    else if (name == "blocking") emit(name, check_blocking(g, span, crashed));
    else if (name == "priority") emit(name, check_priority(g, span, crashed));
    else if (name == "potential") emit(name, check_potential_decrease(g, span, crashed));
    else if (name == "convergence") emit(name, check_convergence_reachability(g, crashed, span));
    else if (name == "starvation:strong" || name == "starvation:weak") {
      bool strong = name == "starvation:strong";
      auto found = find_starvation_lasso(g, crashed, span, strong);
      std::vector<Violation> violations;
      if (found) {
        ++witnesses_found;
        violations.push_back(*found);
      }
      emit(name, violations);
    } else {
      throw text::ParseError("unknown check '" + name + "'");
    }
  }

  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      log << "error: cannot write '" << report_path << "'\n";
      return kExitUsage;
    }
    out << report.dump(2) << "\n";
  }
  if (expect_witness) return witnesses_found > 0 ? kExitClean : kExitViolation;
  return total_violations == 0 ? kExitClean : kExitViolation;
}

inline int cmd_scenario(const std::string& name, const std::string& dir, std::ostream& log) {
  ScenarioReport report;
  size_t expected_steps = 0;
  try {
    Scenario scenario = load_scenario(name, dir);
    expected_steps = scenario.expected.steps.size();
    report = replay(scenario);
  } catch (const ScenarioError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUnknownScenario;
  }
  if (report.pass) {
    log << name << ": pass (" << expected_steps << " steps)\n";
    return kExitClean;
  }
  log << name << ": FAIL";
  if (report.failed_step) log << " at step " << *report.failed_step;
  if (report.failed_processor) log << ", processor " << *report.failed_processor;
  log << ": " << report.message << "\n";
  return kExitViolation;
}

// Per-step per-processor clock series for external plotting. Row per
// processor per configuration, the initial configuration included as step 0.
inline int cmd_plotdata(const std::string& trace_path, std::ostream& out, std::ostream& log) {
  std::ifstream in(trace_path);
  if (!in) {
    log << "error: cannot read '" << trace_path << "'\n";
    return kExitUsage;
  }
  Trace t = read_trace(in);
  Graph g = make_graph(t.topology);
  out << "step,processor,clock,crashed,rule\n";
  for (size_t i = 0; i < t.num_configurations(); ++i) {
    Configuration c = t.configuration_at(i);
    for (ProcessorId p = 0; p < g.n(); ++p) {
      const char* rule = "-";
      if (i > 0) {
        auto it = t.steps[i - 1].fired.find(p);
        if (it != t.steps[i - 1].fired.end()) rule = rule_name(it->second);
      }
      out << i << "," << p << "," << c.clocks[p] << "," << (c.is_crashed(p) ? 1 : 0) << ","
          << rule << "\n";
    }
  }
  return kExitClean;
}

inline int main_with_args(std::vector<std::string> args, std::ostream& out, std::ostream& log) {
  CLI::App app{"Simulation and bounded-verification lab for a fault-tolerant "
               "self-stabilizing unison protocol"};
  app.require_subcommand(1);
  app.set_config("--config");

  detail::RunParams rp;
  auto* run_cmd = app.add_subcommand("run", "Execute the protocol under a daemon and policy");
  run_cmd->configurable(true);
  run_cmd->add_option("--topology", rp.topology, "chain:<n> | ring:<n> | y:<r> | file:<path>")
      ->required();
  run_cmd->add_option("--init", rp.init, "comma-separated clocks or random:<seed>:<max>")
      ->required();
  run_cmd->add_option("--crash", rp.crashes, "crash event <id>@<step>; step 0 = initially");
  run_cmd->add_option("--daemon", rp.daemon, "central | locally-central | distributed | synchronous");
  run_cmd->add_option("--policy", rp.policy, "lru | round-robin | random:<seed> | script:<path>");
  run_cmd->add_option("--max-steps", rp.max_steps, "step budget");
  run_cmd->add_option("--stop", rp.stop, "max-steps | gamma1 | gamma1-stable:<w> | terminal");
  run_cmd->add_option("--out", rp.out_path, "trace output path");
  run_cmd->add_option("--seeds", rp.seeds, "seed sweep a..b (per-seed output files)");

  std::string ck_topology, ck_checks = "closure,blocking,priority,potential";
  std::vector<ProcessorId> ck_crashes;
  uint64_t ck_span = 3;
  bool ck_expect_witness = false;
  std::string ck_report, ck_witness_dir;
  auto* check_cmd = app.add_subcommand("check", "Bounded exhaustive verification");
  check_cmd->configurable(true);
  check_cmd->add_option("--topology", ck_topology, "topology descriptor")->required();
  check_cmd->add_option("--crash", ck_crashes, "initially crashed processor id");
  check_cmd->add_option("--span", ck_span, "canonical clock span bound");
  check_cmd->add_option("--checks", ck_checks,
                        "comma list: closure,blocking,priority,potential,"
                        "starvation:strong,starvation:weak,convergence");
  check_cmd->add_flag("--expect-witness", ck_expect_witness,
                      "exit 0 iff a starvation witness was found");
  check_cmd->add_option("--report", ck_report, "machine-readable summary path (JSON)");
  check_cmd->add_option("--witness-dir", ck_witness_dir, "directory for witness trace files");

  std::string sc_name, sc_dir = default_scenario_dir();
  auto* scenario_cmd = app.add_subcommand("scenario", "Replay a golden scenario");
  scenario_cmd->add_option("name", sc_name, "scenario name")->required();
  scenario_cmd->add_option("--dir", sc_dir, "fixture directory");

  std::string pd_trace, pd_out;
  auto* plot_cmd = app.add_subcommand("plotdata", "Emit a clock series CSV from a trace");
  plot_cmd->add_option("trace", pd_trace, "trace file")->required();
  plot_cmd->add_option("--out", pd_out, "CSV output path (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("unison-lab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitClean;
    }
    log << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(rp, log);
    if (check_cmd->parsed())
      return cmd_check(ck_topology, ck_crashes, ck_span, ck_checks, ck_expect_witness, ck_report,
                       ck_witness_dir, log);
    if (scenario_cmd->parsed()) return cmd_scenario(sc_name, sc_dir, log);
    if (plot_cmd->parsed()) {
      if (pd_out.empty()) return cmd_plotdata(pd_trace, out, log);
      std::ofstream file(pd_out);
      if (!file) {
        log << "error: cannot write '" << pd_out << "'\n";
        return kExitUsage;
      }
      return cmd_plotdata(pd_trace, file, log);
    }
  } catch (const ScriptViolation& e) {
    log << "error: " << e.what() << "\n";
    return kExitScript;
  } catch (const text::ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace unison::cli
