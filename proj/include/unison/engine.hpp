#pragma once

// Step semantics, crash injection, the run loop, trace recording with a
// bit-exact text format, and run metrics.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "unison/core.hpp"
#include "unison/protocol.hpp"
#include "unison/scheduler.hpp"
#include "unison/topology.hpp"

namespace unison {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One crash event per processor: the processor stops before selection at the
// given step index; index 0 means crashed initially. Its clock variables stay
// readable forever.
struct CrashPlan {
  std::vector<std::pair<ProcessorId, uint64_t>> events;

  void validate(uint32_t n) const {
    std::set<ProcessorId> seen;
    for (auto [p, step] : events) {
      if (p >= n) throw EngineError("crash plan names processor " + std::to_string(p));
      if (!seen.insert(p).second)
        throw EngineError("crash plan crashes processor " + std::to_string(p) + " twice");
    }
  }

  std::set<ProcessorId> crashed_at_or_before(uint64_t step) const {
    std::set<ProcessorId> out;
    for (auto [p, s] : events)
      if (s <= step) out.insert(p);
    return out;
  }
};

inline std::string format_crash_plan(const CrashPlan& plan) {
  std::string out;
  for (auto [p, s] : plan.events) {
    if (!out.empty()) out += ',';
    out += std::to_string(p) + "@" + std::to_string(s);
  }
  return out;
}

inline CrashPlan parse_crash_plan(std::string_view s) {
  CrashPlan plan;
  if (text::trim(s).empty()) return plan;
  for (auto tok : text::split(s, ',')) {
    auto at = tok.find('@');
    if (at == std::string_view::npos)
      throw text::ParseError("crash events are <id>@<step>, got '" + std::string(tok) + "'");
    plan.events.emplace_back(static_cast<ProcessorId>(text::parse_u64(text::trim(tok.substr(0, at)))),
                             text::parse_u64(text::trim(tok.substr(at + 1))));
  }
  return plan;
}

struct Step {
  std::set<ProcessorId> selected;
  std::map<ProcessorId, Rule> fired;  // keys == selected
  std::vector<ClockValue> clocks_after;
  std::set<ProcessorId> crashed_after;
  uint64_t shift_applied = 0;  // canonicalization during checker-mode runs, else 0
  bool gamma1_after = false;
};

enum class RunStatus : uint8_t { MaxSteps, Gamma1Reached, Gamma1Stable, Terminal, ScriptExhausted };

inline const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::MaxSteps: return "max-steps";
    case RunStatus::Gamma1Reached: return "gamma1-reached";
    case RunStatus::Gamma1Stable: return "gamma1-stable";
    case RunStatus::Terminal: return "terminal";
    case RunStatus::ScriptExhausted: return "script-exhausted";
  }
  return "?";
}

inline RunStatus parse_run_status(std::string_view s) {
  if (s == "max-steps") return RunStatus::MaxSteps;
  if (s == "gamma1-reached") return RunStatus::Gamma1Reached;
  if (s == "gamma1-stable") return RunStatus::Gamma1Stable;
  if (s == "terminal") return RunStatus::Terminal;
  if (s == "script-exhausted") return RunStatus::ScriptExhausted;
  throw text::ParseError("unknown run status '" + std::string(s) + "'");
}

struct Trace {
  std::string topology;          // descriptor, replayable via make_graph
  Configuration initial;         // step-0 crashes already applied
  CrashPlan crash_plan;
  std::string policy;            // descriptor of the policy that drove the run
  std::string daemon = "locally-central";
  uint64_t seed = 0;
  RunStatus status = RunStatus::MaxSteps;
  std::optional<size_t> lasso_start;  // index into configurations(), for witness lassos
  std::vector<Step> steps;

  // Configuration after step i (0 = initial).
  Configuration configuration_at(size_t i) const {
    if (i == 0) return initial;
    const Step& s = steps.at(i - 1);
    return Configuration{s.clocks_after, s.crashed_after};
  }
  size_t num_configurations() const { return steps.size() + 1; }
};

// Atomic application of one selection: every write is computed from the
// pre-state, then all clocks change at once. Members must be enabled and
// non-crashed.
inline Configuration step(const Graph& g, const Configuration& c,
                          const std::set<ProcessorId>& selected,
                          const DecisionFn& decide = uftss_decide,
                          std::map<ProcessorId, Rule>* fired = nullptr) {
  check_consistent(g, c);
  if (selected.empty()) throw EngineError("step with an empty selection");
  std::vector<std::pair<ProcessorId, ClockValue>> writes;
  for (ProcessorId p : selected) {
    if (c.is_crashed(p))
      throw EngineError("illegal step: processor " + std::to_string(p) + " is crashed");
    RuleDecision d = decide(g, c, p);
    if (!d.enabled())
      throw EngineError("illegal step: processor " + std::to_string(p) + " is not enabled");
    writes.emplace_back(p, d.write_value);
    if (fired) (*fired)[p] = d.rule;
  }
  Configuration out = c;
  for (auto [p, v] : writes) out.clocks[p] = v;
  return out;
}

struct StopCondition {
  enum class Kind : uint8_t { MaxStepsOnly, Gamma1Reached, Gamma1StableFor, Terminal };
  Kind kind = Kind::MaxStepsOnly;
  uint64_t window = 0;  // for Gamma1StableFor

  static StopCondition max_steps_only() { return {}; }
  static StopCondition gamma1_reached() { return {Kind::Gamma1Reached, 0}; }
  static StopCondition gamma1_stable_for(uint64_t w) { return {Kind::Gamma1StableFor, w}; }
  static StopCondition terminal() { return {Kind::Terminal, 0}; }
};

struct RunOptions {
  DaemonKind daemon = DaemonKind::LocallyCentral;
  uint64_t max_steps = 0;
  StopCondition stop = StopCondition::max_steps_only();
  bool canonicalize_steps = false;  // checker-mode: shift every post-state
  uint64_t seed = 0;                // recorded in the trace header
};

// Runs select + step until max_steps, the stop condition, script exhaustion,
// or a terminal configuration (nothing enabled). Crashes scheduled at index k
// take effect before selection at step k.
inline Trace run(const Graph& g, const Configuration& c0, SelectionPolicy& policy,
                 const CrashPlan& crash_plan, const RunOptions& opts,
                 const DecisionFn& decide = uftss_decide) {
  check_consistent(g, c0);
  crash_plan.validate(g.n());

  Trace trace;
  trace.topology = g.descriptor();
  trace.crash_plan = crash_plan;
  trace.policy = policy.descriptor();
  trace.daemon = daemon_name(opts.daemon);
  trace.seed = opts.seed;

  Configuration c = c0;
  for (auto [p, s] : crash_plan.events)
    if (s == 0) c.crashed.insert(p);
  // Processors already crashed in c0 become step-0 events so the serialized
  // trace carries the full crash state.
  for (ProcessorId p : c0.crashed) {
    bool planned = false;
    for (auto [q, s] : crash_plan.events) {
      if (q != p) continue;
      if (s > 0)
        throw EngineError("processor " + std::to_string(p) +
                          " is already crashed but scheduled to crash later");
      planned = true;
    }
    if (!planned) trace.crash_plan.events.emplace_back(p, 0);
  }
  trace.initial = c;

  std::vector<int64_t> last_executed(g.n(), -1);
  uint64_t gamma1_streak = is_gamma1(g, c) ? 1 : 0;
  if (opts.stop.kind == StopCondition::Kind::Gamma1Reached && gamma1_streak) {
    trace.status = RunStatus::Gamma1Reached;
    return trace;
  }
  if (opts.stop.kind == StopCondition::Kind::Gamma1StableFor && gamma1_streak >= opts.stop.window) {
    trace.status = RunStatus::Gamma1Stable;
    return trace;
  }

  trace.status = RunStatus::MaxSteps;
  for (uint64_t k = 1; k <= opts.max_steps; ++k) {
    for (auto [p, s] : crash_plan.events)
      if (s == k) c.crashed.insert(p);

    std::set<ProcessorId> enabled;
    for (ProcessorId p = 0; p < g.n(); ++p)
      if (is_enabled(g, c, p, decide)) enabled.insert(p);
    if (enabled.empty()) {
      trace.status = RunStatus::Terminal;
      break;
    }
    if (policy.exhausted(k)) {
      trace.status = RunStatus::ScriptExhausted;
      break;
    }

    SelectionContext ctx{g, c, enabled, last_executed, k};
    std::set<ProcessorId> selected = policy.select(opts.daemon, ctx);
    if (!is_legal_selection(opts.daemon, g, selected, enabled))
      throw EngineError("policy emitted an illegal selection at step " + std::to_string(k));

    Step record;
    record.selected = selected;
    Configuration next = step(g, c, selected, decide, &record.fired);
    if (opts.canonicalize_steps) {
      auto [canon, shift] = canonicalize(g, next);
      next = canon;
      record.shift_applied = shift;
    }
    record.clocks_after = next.clocks;
    record.crashed_after = next.crashed;
    record.gamma1_after = is_gamma1(g, next);
    trace.steps.push_back(std::move(record));

    for (ProcessorId p : selected) last_executed[p] = static_cast<int64_t>(k);
    c = next;

    gamma1_streak = trace.steps.back().gamma1_after ? gamma1_streak + 1 : 0;
    if (opts.stop.kind == StopCondition::Kind::Gamma1Reached && gamma1_streak) {
      trace.status = RunStatus::Gamma1Reached;
      break;
    }
    if (opts.stop.kind == StopCondition::Kind::Gamma1StableFor && gamma1_streak >= opts.stop.window) {
      trace.status = RunStatus::Gamma1Stable;
      break;
    }
  }
  return trace;
}

// --- Trace text format ------------------------------------------------------
//
// Header line of key=value tokens (topology, init clocks, crash plan, policy,
// daemon, seed, status, optional lasso_start), then one flat record per step:
//
//   step=<k> selected=<ids> rules=<p:R,...> clocks=<v0,...> crashed=<ids> gamma1=<0|1>
//
// plus shift=<s> when a checker-mode step was canonicalized. Round-trips
// bit-exactly.

inline void write_trace(std::ostream& out, const Trace& t) {
  out << "topology=" << t.topology << " init=" << text::join_u64(t.initial.clocks)
      << " crashplan=" << format_crash_plan(t.crash_plan) << " policy=" << t.policy
      << " daemon=" << t.daemon << " seed=" << t.seed << " status=" << run_status_name(t.status);
  if (t.lasso_start) out << " lasso_start=" << *t.lasso_start;
  out << "\n";
  for (size_t i = 0; i < t.steps.size(); ++i) {
    const Step& s = t.steps[i];
    out << "step=" << (i + 1) << " selected=" << text::join_u64(s.selected) << " rules=";
    bool first = true;
    for (auto [p, r] : s.fired) {
      if (!first) out << ',';
      out << p << ':' << rule_name(r);
      first = false;
    }
    out << " clocks=" << text::join_u64(s.clocks_after)
        << " crashed=" << text::join_u64(s.crashed_after) << " gamma1=" << (s.gamma1_after ? 1 : 0);
    if (s.shift_applied) out << " shift=" << s.shift_applied;
    out << "\n";
  }
}

inline std::string trace_to_string(const Trace& t) {
  std::ostringstream out;
  write_trace(out, t);
  return out.str();
}

inline Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  // Header = first payload line; `#` lines are fixture comments.
  std::string_view header;
  while (std::getline(in, line)) {
    header = text::strip_comment(line);
    if (!header.empty()) break;
  }
  if (header.empty()) throw text::ParseError("empty trace file");
  for (auto tok : text::split(header, ' ')) {
    if (tok.empty()) continue;
    auto [key, value] = text::split_kv(tok);
    if (key == "topology") t.topology = std::string(value);
    else if (key == "init") t.initial.clocks = text::parse_u64_list(value);
    else if (key == "crashplan") t.crash_plan = parse_crash_plan(value);
    else if (key == "policy") t.policy = std::string(value);
    else if (key == "daemon") t.daemon = std::string(value);
    else if (key == "seed") t.seed = text::parse_u64(value);
    else if (key == "status") t.status = parse_run_status(value);
    else if (key == "lasso_start") t.lasso_start = text::parse_u64(value);
    else throw text::ParseError("unknown trace header key '" + std::string(key) + "'");
  }
  for (auto [p, s] : t.crash_plan.events)
    if (s == 0) t.initial.crashed.insert(p);

  while (std::getline(in, line)) {
    auto payload = text::strip_comment(line);
    if (payload.empty()) continue;
    Step s;
    uint64_t index = 0;
    for (auto tok : text::split(payload, ' ')) {
      if (tok.empty()) continue;
      auto [key, value] = text::split_kv(tok);
      if (key == "step") index = text::parse_u64(value);
      else if (key == "selected") {
        for (uint64_t id : text::parse_u64_list(value)) s.selected.insert(static_cast<ProcessorId>(id));
      } else if (key == "rules") {
        if (!value.empty())
          for (auto pr : text::split(value, ',')) {
            auto colon = pr.find(':');
            if (colon == std::string_view::npos)
              throw text::ParseError("rules entries are <p>:<R>, got '" + std::string(pr) + "'");
            s.fired[static_cast<ProcessorId>(text::parse_u64(pr.substr(0, colon)))] =
                parse_rule(pr.substr(colon + 1));
          }
      } else if (key == "clocks") s.clocks_after = text::parse_u64_list(value);
      else if (key == "crashed") {
        for (uint64_t id : text::parse_u64_list(value)) s.crashed_after.insert(static_cast<ProcessorId>(id));
      } else if (key == "gamma1") s.gamma1_after = text::parse_u64(value) != 0;
      else if (key == "shift") s.shift_applied = text::parse_u64(value);
      else throw text::ParseError("unknown step key '" + std::string(key) + "'");
    }
    if (index != t.steps.size() + 1)
      throw text::ParseError("step records out of order at step " + std::to_string(index));
    t.steps.push_back(std::move(s));
  }
  return t;
}

// Re-executes the recorded selections from the initial configuration and
// checks every recorded post-state, rule, crash set and gamma-1 flag.
// Returns the failing step index, or nullopt when the trace replays exactly.
inline std::optional<size_t> replay_mismatch(const Graph& g, const Trace& t,
                                             const DecisionFn& decide = uftss_decide) {
  Configuration c = t.initial;
  for (size_t i = 0; i < t.steps.size(); ++i) {
    uint64_t k = i + 1;
    for (auto [p, s] : t.crash_plan.events)
      if (s == k) c.crashed.insert(p);
    const Step& rec = t.steps[i];
    std::map<ProcessorId, Rule> fired;
    Configuration next;
    try {
      next = step(g, c, rec.selected, decide, &fired);
    } catch (const EngineError&) {
      return i + 1;
    }
    if (rec.shift_applied) {
      auto [canon, shift] = canonicalize(g, next);
      if (shift != rec.shift_applied) return i + 1;
      next = canon;
    }
    if (next.clocks != rec.clocks_after || next.crashed != rec.crashed_after) return i + 1;
    if (fired != rec.fired) return i + 1;
    if (is_gamma1(g, next) != rec.gamma1_after) return i + 1;
    c = next;
  }
  return std::nullopt;
}

// Fairness classification of the cycle trace[cycle_start..end]. The two end
// configurations must agree up to a uniform shift.
inline FairnessVerdict classify_lasso(const Graph& g, const Trace& t, size_t cycle_start,
                                      const DecisionFn& decide = uftss_decide) {
  if (cycle_start + 1 > t.steps.size())
    throw LassoError("cycle start " + std::to_string(cycle_start) + " leaves no cycle steps");
  std::vector<Configuration> configs;
  std::vector<std::set<ProcessorId>> executed;
  for (size_t i = cycle_start; i < t.num_configurations(); ++i) {
    Configuration c = t.configuration_at(i);
    // Raw clocks: undo the canonicalization shifts accumulated inside the
    // cycle so the endpoints compare in one coordinate system.
    uint64_t shift = 0;
    for (size_t j = cycle_start; j < i; ++j) shift += t.steps[j].shift_applied;
    for (ClockValue& v : c.clocks) v += shift;
    configs.push_back(std::move(c));
    if (i < t.steps.size() && i >= cycle_start) executed.push_back(t.steps[i].selected);
  }
  return classify_cycle(g, configs, executed, decide);
}

// --- Run metrics -------------------------------------------------------------

struct ProcessorMetrics {
  uint64_t increments = 0;
  uint64_t decrements = 0;
  uint64_t executions = 0;
  uint64_t neutralizations = 0;
};

struct RunMetrics {
  std::vector<ProcessorMetrics> per_processor;
  // First configuration index from which gamma-1 holds for the rest of the
  // trace; nullopt when the trace never settles.
  std::optional<size_t> steps_to_gamma1;
  // Longest stretch of steps without an increment inside the settled suffix
  // (window boundaries count); nullopt for crashed processors or when the
  // suffix is missing.
  std::vector<std::optional<uint64_t>> longest_increment_gap_after_gamma1;
};

inline RunMetrics metrics(const Graph& g, const Trace& t, const DecisionFn& decide = uftss_decide) {
  RunMetrics m;
  m.per_processor.resize(g.n());
  m.longest_increment_gap_after_gamma1.assign(g.n(), std::nullopt);

  std::vector<bool> gamma_flags(t.num_configurations());
  gamma_flags[0] = is_gamma1(g, t.initial);
  for (size_t i = 0; i < t.steps.size(); ++i) gamma_flags[i + 1] = t.steps[i].gamma1_after;

  Configuration prev = t.initial;
  std::vector<std::vector<int64_t>> raw_delta(g.n());  // per step, signed
  for (size_t i = 0; i < t.steps.size(); ++i) {
    const Step& s = t.steps[i];
    Configuration cur{s.clocks_after, s.crashed_after};
    for (ProcessorId p = 0; p < g.n(); ++p) {
      bool executed = s.selected.count(p) != 0;
      // Raw movement: recorded post-clock plus this step's shift, relative to
      // the pre-clock in the same coordinates.
      int64_t delta = static_cast<int64_t>(s.clocks_after[p] + s.shift_applied) -
                      static_cast<int64_t>(prev.clocks[p]);
      raw_delta[p].push_back(delta);
      if (executed) {
        ++m.per_processor[p].executions;
        if (delta > 0) ++m.per_processor[p].increments;
        if (delta < 0) ++m.per_processor[p].decrements;
      } else if (cur.is_crashed(p) == prev.is_crashed(p) &&
                 neutralized(g, prev, cur, p, false, decide)) {
        // Crashing between steps silences a processor; only guards falsified
        // by neighbor moves count as neutralization.
        ++m.per_processor[p].neutralizations;
      }
    }
    prev = cur;
  }

  // Settle point: scan from the end for the earliest all-gamma-1 suffix.
  std::optional<size_t> settle;
  for (size_t i = gamma_flags.size(); i-- > 0;) {
    if (!gamma_flags[i]) break;
    settle = i;
  }
  m.steps_to_gamma1 = settle;
  if (settle) {
    for (ProcessorId p = 0; p < g.n(); ++p) {
      if (t.configuration_at(*settle).is_crashed(p)) continue;
      uint64_t gap = 0, worst = 0;
      for (size_t i = *settle; i < t.steps.size(); ++i) {
        if (raw_delta[p][i] > 0) gap = 0;
        else ++gap;
        worst = std::max(worst, gap);
      }
      m.longest_increment_gap_after_gamma1[p] = worst;
    }
  }
  return m;
}

}  // namespace unison
