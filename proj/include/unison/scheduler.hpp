#pragma once

// Daemons (which selection sets are legal) and selection policies (which
// legal set actually runs), plus after-the-fact fairness classification of
// repeated cycles. Policies are stateful and single-owner per run; distinct
// runs may execute in parallel with their own policy instances.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "unison/core.hpp"
#include "unison/protocol.hpp"
#include "unison/topology.hpp"

namespace unison {

enum class DaemonKind : uint8_t { Central, LocallyCentral, Distributed, Synchronous };

inline const char* daemon_name(DaemonKind d) {
  switch (d) {
    case DaemonKind::Central: return "central";
    case DaemonKind::LocallyCentral: return "locally-central";
    case DaemonKind::Distributed: return "distributed";
    case DaemonKind::Synchronous: return "synchronous";
  }
  return "?";
}

inline DaemonKind parse_daemon(std::string_view s) {
  if (s == "central") return DaemonKind::Central;
  if (s == "locally-central") return DaemonKind::LocallyCentral;
  if (s == "distributed") return DaemonKind::Distributed;
  if (s == "synchronous") return DaemonKind::Synchronous;
  throw text::ParseError("unknown daemon '" + std::string(s) + "'");
}

// A selection is legal when it is a non-empty subset of the enabled set and
// meets the daemon constraint. Enabled sets never contain crashed processors,
// so selections cannot either.
inline bool is_legal_selection(DaemonKind daemon, const Graph& g,
                               const std::set<ProcessorId>& selection,
                               const std::set<ProcessorId>& enabled) {
  if (selection.empty()) return false;
  for (ProcessorId p : selection)
    if (!enabled.count(p)) return false;
  switch (daemon) {
    case DaemonKind::Central:
      return selection.size() == 1;
    case DaemonKind::LocallyCentral:
      for (ProcessorId p : selection)
        for (ProcessorId q : selection)
          if (p < q && g.has_edge(p, q)) return false;
      return true;
    case DaemonKind::Distributed:
      return true;
    case DaemonKind::Synchronous:
      return selection == enabled;
  }
  return false;
}

struct SelectionContext {
  const Graph& graph;
  const Configuration& config;
  const std::set<ProcessorId>& enabled;      // non-empty, non-crashed
  const std::vector<int64_t>& last_executed; // -1 = never, else step index
  uint64_t step_index;                       // 1-based
};

class ScriptViolation : public std::runtime_error {
 public:
  ScriptViolation(uint64_t step, const std::string& what)
      : std::runtime_error("script step " + std::to_string(step) + ": " + what), step_(step) {}
  uint64_t step() const { return step_; }

 private:
  uint64_t step_;
};

class SelectionPolicy {
 public:
  virtual ~SelectionPolicy() = default;
  virtual std::set<ProcessorId> select(DaemonKind daemon, const SelectionContext& ctx) = 0;
  virtual std::string descriptor() const = 0;
  // Scripted policies report exhaustion so a run can stop cleanly.
  virtual bool exhausted(uint64_t step_index) const { (void)step_index; return false; }
};

namespace detail {

// Greedily extends a candidate ordering into a legal set: one processor for a
// central daemon, a maximal independent set for a locally central one, and
// everything for the rest.
inline std::set<ProcessorId> greedy_legal(DaemonKind daemon, const Graph& g,
                                          std::span<const ProcessorId> ordered) {
  std::set<ProcessorId> out;
  for (ProcessorId p : ordered) {
    if (daemon == DaemonKind::Central && !out.empty()) break;
    bool clashes = false;
    if (daemon == DaemonKind::LocallyCentral)
      for (ProcessorId q : out)
        if (g.has_edge(p, q)) { clashes = true; break; }
    if (!clashes) out.insert(p);
  }
  return out;
}

}  // namespace detail

// Least-recently-executed first, id tie-break; picks a maximal legal set
// greedily in that order. Realizes strongly fair scheduling on finite runs.
class LruPolicy : public SelectionPolicy {
 public:
  std::set<ProcessorId> select(DaemonKind daemon, const SelectionContext& ctx) override {
    std::vector<ProcessorId> order(ctx.enabled.begin(), ctx.enabled.end());
    std::stable_sort(order.begin(), order.end(), [&](ProcessorId a, ProcessorId b) {
      if (ctx.last_executed[a] != ctx.last_executed[b])
        return ctx.last_executed[a] < ctx.last_executed[b];
      return a < b;
    });
    return detail::greedy_legal(daemon, ctx.graph, order);
  }
  std::string descriptor() const override { return "lru"; }
};

// Rotating-cursor ordering over processor ids.
class RoundRobinPolicy : public SelectionPolicy {
 public:
  std::set<ProcessorId> select(DaemonKind daemon, const SelectionContext& ctx) override {
    uint32_t n = ctx.graph.n();
    std::vector<ProcessorId> order(ctx.enabled.begin(), ctx.enabled.end());
    std::sort(order.begin(), order.end(), [&](ProcessorId a, ProcessorId b) {
      return (a + n - cursor_ % n) % n < (b + n - cursor_ % n) % n;
    });
    auto out = detail::greedy_legal(daemon, ctx.graph, order);
    cursor_ = (*out.begin() + 1) % n;
    return out;
  }
  std::string descriptor() const override { return "round-robin"; }

 private:
  uint32_t cursor_ = 0;
};

// Uniformly random maximal legal subset: greedy over a random permutation of
// the enabled set. The seed is recorded in trace headers for replay.
class SeededRandomPolicy : public SelectionPolicy {
 public:
  explicit SeededRandomPolicy(uint64_t seed) : seed_(seed), rng_(seed) {}

  std::set<ProcessorId> select(DaemonKind daemon, const SelectionContext& ctx) override {
    std::vector<ProcessorId> order(ctx.enabled.begin(), ctx.enabled.end());
    std::shuffle(order.begin(), order.end(), rng_);
    return detail::greedy_legal(daemon, ctx.graph, order);
  }
  std::string descriptor() const override { return "random:" + std::to_string(seed_); }
  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 rng_;
};

// Adversarial scheduling: a fixed list of selection sets, validated against
// the enabled set and daemon constraint at every step.
class ScriptedPolicy : public SelectionPolicy {
 public:
  explicit ScriptedPolicy(std::vector<std::set<ProcessorId>> steps, std::string label = "script")
      : steps_(std::move(steps)), label_(std::move(label)) {}

  std::set<ProcessorId> select(DaemonKind daemon, const SelectionContext& ctx) override {
    if (ctx.step_index == 0 || ctx.step_index > steps_.size())
      throw ScriptViolation(ctx.step_index, "script exhausted");
    const auto& sel = steps_[ctx.step_index - 1];
    for (ProcessorId p : sel) {
      if (ctx.config.is_crashed(p))
        throw ScriptViolation(ctx.step_index, "selects crashed processor " + std::to_string(p));
      if (!ctx.enabled.count(p))
        throw ScriptViolation(ctx.step_index, "selects disabled processor " + std::to_string(p));
    }
    if (!is_legal_selection(daemon, ctx.graph, sel, ctx.enabled))
      throw ScriptViolation(ctx.step_index, "selection violates the " +
                                                std::string(daemon_name(daemon)) + " daemon");
    return sel;
  }
  std::string descriptor() const override { return label_; }
  bool exhausted(uint64_t step_index) const override { return step_index > steps_.size(); }
  size_t length() const { return steps_.size(); }

 private:
  std::vector<std::set<ProcessorId>> steps_;
  std::string label_;
};

// Script file: one line per step, comma-separated processor ids. `#` starts
// a comment.
inline std::vector<std::set<ProcessorId>> read_script(std::istream& in) {
  std::vector<std::set<ProcessorId>> steps;
  std::string line;
  while (std::getline(in, line)) {
    auto payload = text::strip_comment(line);
    if (payload.empty()) continue;
    std::set<ProcessorId> sel;
    for (uint64_t id : text::parse_u64_list(payload)) sel.insert(static_cast<ProcessorId>(id));
    steps.push_back(std::move(sel));
  }
  return steps;
}

// Policy spec strings: `lru`, `round-robin`, `random:<seed>`, `script:<path>`.
inline std::unique_ptr<SelectionPolicy> parse_policy(const std::string& spec) {
  if (spec == "lru") return std::make_unique<LruPolicy>();
  if (spec == "round-robin") return std::make_unique<RoundRobinPolicy>();
  if (spec.rfind("random:", 0) == 0)
    return std::make_unique<SeededRandomPolicy>(text::parse_u64(std::string_view(spec).substr(7)));
  if (spec.rfind("script:", 0) == 0) {
    std::string path = spec.substr(7);
    std::ifstream in(path);
    if (!in) throw text::ParseError("cannot open script file '" + path + "'");
    return std::make_unique<ScriptedPolicy>(read_script(in), spec);
  }
  throw text::ParseError("unknown policy '" + spec + "'");
}

// True iff p was enabled before the step, did not execute in it, and is no
// longer enabled after it.
inline bool neutralized(const Graph& g, const Configuration& before, const Configuration& after,
                        ProcessorId p, bool executed, const DecisionFn& decide = uftss_decide) {
  if (executed) return false;
  return is_enabled(g, before, p, decide) && !is_enabled(g, after, p, decide);
}

struct FairnessVerdict {
  bool strongly_fair_admissible = false;
  bool weakly_fair_admissible = false;
};

class LassoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fairness classification of a repeated cycle, given the cycle's k+1
// configurations (last = first up to a uniform clock shift) and the k
// executed sets between them.
//
//   strongly fair admissible: every processor enabled in at least one cycle
//     configuration executes in at least one cycle step.
//   weakly fair admissible: every processor enabled in all cycle
//     configurations executes in at least one cycle step.
inline FairnessVerdict classify_cycle(const Graph& g, std::span<const Configuration> configs,
                                      std::span<const std::set<ProcessorId>> executed,
                                      const DecisionFn& decide = uftss_decide) {
  if (configs.size() < 2 || executed.size() + 1 != configs.size())
    throw LassoError("cycle must contain at least one step");
  const Configuration& first = configs.front();
  const Configuration& last = configs.back();
  if (first.crashed != last.crashed) throw LassoError("crash set changes across the cycle");
  if (last.clocks.front() < first.clocks.front()) throw LassoError("cycle shift is negative");
  uint64_t delta = last.clocks.front() - first.clocks.front();
  for (size_t i = 0; i < first.clocks.size(); ++i)
    if (last.clocks[i] != first.clocks[i] + delta)
      throw LassoError("cycle endpoints differ by a non-uniform shift at processor " +
                       std::to_string(i));

  FairnessVerdict v{true, true};
  for (ProcessorId p = 0; p < g.n(); ++p) {
    if (first.is_crashed(p)) continue;
    bool enabled_some = false, enabled_all = true, did_execute = false;
    for (size_t i = 0; i + 1 < configs.size(); ++i) {
      bool en = is_enabled(g, configs[i], p, decide);
      enabled_some |= en;
      enabled_all &= en;
      did_execute |= executed[i].count(p) != 0;
    }
    if (enabled_some && !did_execute) v.strongly_fair_admissible = false;
    if (enabled_all && !did_execute) v.weakly_fair_admissible = false;
  }
  return v;
}

}  // namespace unison
