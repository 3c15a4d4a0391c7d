#pragma once

// Bounded exhaustive verification over a canonical finite fragment of the
// configuration space: closure, blocking, priority, potential decrease, and
// liveness/starvation via fair-lasso search.
//
// Finiteness: clocks are canonicalized (min in {0,1}) and span-bounded by S.
// Transitions that would leave the span are counted as boundary transitions
// and excluded, so universal claims are explicitly "within span S".

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "unison/core.hpp"
#include "unison/engine.hpp"
#include "unison/protocol.hpp"
#include "unison/scheduler.hpp"
#include "unison/topology.hpp"

namespace unison {

inline uint32_t worker_count() {
  if (const char* env = std::getenv("UNISON_LAB_THREADS")) {
    uint64_t v = 0;
    try { v = text::parse_u64(env); } catch (const text::ParseError&) { v = 0; }
    if (v >= 1) return static_cast<uint32_t>(std::min<uint64_t>(v, 64));
  }
  uint32_t hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

struct StateSpace {
  Graph graph;
  std::set<ProcessorId> crashed;
  uint64_t span;

  // Canonical clock vectors (min in {0,1}, max - min <= span), sorted
  // lexicographically, so construction is independent of exploration order.
  std::vector<std::vector<ClockValue>> states;

  struct Transition {
    uint32_t target;
    uint32_t selected;  // bitmask
    uint64_t shift;     // canonicalization shift of this step
  };
  std::vector<std::vector<Transition>> edges;   // per source state
  std::vector<uint32_t> enabled;                // bitmask per state
  uint64_t transitions = 0;
  uint64_t boundary_transitions = 0;

  Configuration configuration(uint32_t s) const { return {states[s], crashed}; }

  std::optional<uint32_t> find(const std::vector<ClockValue>& clocks) const {
    auto it = std::lower_bound(states.begin(), states.end(), clocks);
    if (it == states.end() || *it != clocks) return std::nullopt;
    return static_cast<uint32_t>(it - states.begin());
  }

  // Raw clock movement of p along a transition, in pre-state coordinates.
  int64_t raw_delta(uint32_t source, const Transition& t, ProcessorId p) const {
    return static_cast<int64_t>(states[t.target][p] + t.shift) -
           static_cast<int64_t>(states[source][p]);
  }
};

namespace detail {

inline std::vector<std::vector<ClockValue>> canonical_states(uint32_t n, uint64_t span) {
  std::vector<std::vector<ClockValue>> out;
  std::vector<ClockValue> v(n, 0);
  ClockValue limit = static_cast<ClockValue>(span + 1);
  while (true) {
    ClockValue min = v[0], max = v[0];
    for (ClockValue x : v) { min = std::min(min, x); max = std::max(max, x); }
    if (min <= 1 && max - min <= span) out.push_back(v);
    size_t i = 0;
    while (i < v.size() && v[i] == limit) v[i++] = 0;
    if (i == v.size()) break;
    ++v[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All non-empty subsets of `enabled` with no two members adjacent: the legal
// locally central selections.
inline std::vector<uint32_t> locally_central_selections(const Graph& g, uint32_t enabled_mask) {
  std::vector<ProcessorId> members;
  for (ProcessorId p = 0; p < g.n(); ++p)
    if (enabled_mask & (1u << p)) members.push_back(p);
  std::vector<uint32_t> out;
  uint32_t count = 1u << members.size();
  for (uint32_t pick = 1; pick < count; ++pick) {
    uint32_t mask = 0;
    for (size_t i = 0; i < members.size(); ++i)
      if (pick & (1u << i)) mask |= 1u << members[i];
    bool independent = true;
    for (size_t i = 0; i < members.size() && independent; ++i)
      if (pick & (1u << i))
        for (size_t j = i + 1; j < members.size() && independent; ++j)
          if ((pick & (1u << j)) && g.has_edge(members[i], members[j])) independent = false;
    if (independent) out.push_back(mask);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::set<ProcessorId> mask_to_set(uint32_t mask, uint32_t n) {
  std::set<ProcessorId> out;
  for (ProcessorId p = 0; p < n; ++p)
    if (mask & (1u << p)) out.insert(p);
  return out;
}

}  // namespace detail

inline StateSpace build_state_space(const Graph& g, const std::set<ProcessorId>& crashed,
                                    uint64_t span, const DecisionFn& decide = uftss_decide) {
  if (g.n() > 30) throw std::invalid_argument("state spaces are limited to 30 processors");
  StateSpace space{g, crashed, span, detail::canonical_states(g.n(), span), {}, {}, 0, 0};
  size_t count = space.states.size();
  space.edges.resize(count);
  space.enabled.resize(count);

  std::vector<uint64_t> boundary_per_state(count, 0);
  auto worker = [&](size_t begin, size_t end) {
    for (size_t s = begin; s < end; ++s) {
      Configuration c{space.states[s], crashed};
      uint32_t enabled_mask = 0;
      for (ProcessorId p = 0; p < g.n(); ++p)
        if (is_enabled(g, c, p, decide)) enabled_mask |= 1u << p;
      space.enabled[s] = enabled_mask;
      if (!enabled_mask) continue;
      for (uint32_t sel : detail::locally_central_selections(g, enabled_mask)) {
        Configuration next = step(g, c, detail::mask_to_set(sel, g.n()), decide);
        auto [canon, shift] = canonicalize(g, next);
        auto target = space.find(canon.clocks);
        if (!target) {
          ++boundary_per_state[s];
          continue;
        }
        space.edges[s].push_back({*target, sel, shift});
      }
    }
  };

  uint32_t workers = std::min<uint32_t>(worker_count(), static_cast<uint32_t>(count ? count : 1));
  if (workers <= 1 || count < 256) {
    worker(0, count);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (count + workers - 1) / workers;
    for (uint32_t w = 0; w < workers; ++w) {
      size_t begin = w * chunk;
      size_t end = std::min(count, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  for (size_t s = 0; s < count; ++s) {
    space.transitions += space.edges[s].size();
    space.boundary_transitions += boundary_per_state[s];
  }
  return space;
}

// --- Violations ---------------------------------------------------------------

enum class ViolationKind : uint8_t { Closure, Blocking, Priority, Potential, Starvation, Freeze };

inline const char* violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::Closure: return "closure";
    case ViolationKind::Blocking: return "blocking";
    case ViolationKind::Priority: return "priority";
    case ViolationKind::Potential: return "potential";
    case ViolationKind::Starvation: return "starvation";
    case ViolationKind::Freeze: return "freeze";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
  Trace witness;  // replays through the engine and exhibits the breach
  std::optional<ProcessorId> processor;
  std::vector<ProcessorId> starved;  // processors never incremented on the witness cycle
};

namespace detail {

inline CrashPlan initial_crash_plan(const std::set<ProcessorId>& crashed) {
  CrashPlan plan;
  for (ProcessorId p : crashed) plan.events.emplace_back(p, 0);
  return plan;
}

// Runs the scripted selections through the engine to produce a replayable
// witness trace.
inline Trace witness_trace(const Graph& g, const Configuration& start,
                           const std::vector<std::set<ProcessorId>>& selections, bool canonical,
                           const DecisionFn& decide) {
  ScriptedPolicy policy{selections, "witness"};
  RunOptions opts;
  opts.daemon = DaemonKind::LocallyCentral;
  opts.max_steps = selections.size();
  opts.canonicalize_steps = canonical;
  Configuration bare = start;
  bare.crashed.clear();
  Trace t = run(g, bare, policy, initial_crash_plan(start.crashed), opts, decide);
  t.policy = "witness";
  return t;
}

}  // namespace detail

// --- Exhaustive per-configuration checks ---------------------------------------

// Every locally central successor of a gamma-1 configuration stays in
// gamma-1.
inline std::vector<Violation> check_closure(const Graph& g, const std::set<ProcessorId>& crashed,
                                            uint64_t span, const DecisionFn& decide = uftss_decide) {
  std::vector<Violation> out;
  for (const auto& clocks : detail::canonical_states(g.n(), span)) {
    Configuration c{clocks, crashed};
    if (!is_gamma1(g, c)) continue;
    uint32_t enabled_mask = 0;
    for (ProcessorId p = 0; p < g.n(); ++p)
      if (is_enabled(g, c, p, decide)) enabled_mask |= 1u << p;
    if (!enabled_mask) continue;
    for (uint32_t sel : detail::locally_central_selections(g, enabled_mask)) {
      auto selected = detail::mask_to_set(sel, g.n());
      Configuration next = step(g, c, selected, decide);
      if (!is_gamma1(g, next)) {
        Violation v{ViolationKind::Closure,
                    "gamma-1 configuration " + format_configuration(c) +
                        " left gamma-1 via selection {" + text::join_u64(selected) + "}",
                    detail::witness_trace(g, c, {selected}, false, decide),
                    std::nullopt,
                    {}};
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

// A processor with neighbors pinning it from below and above (H_p - 1 and
// H_p + 1) must not be enabled.
inline std::vector<Violation> check_blocking(const Graph& g, uint64_t span,
                                             const std::set<ProcessorId>& crashed = {},
                                             const DecisionFn& decide = uftss_decide) {
  std::vector<Violation> out;
  for (const auto& clocks : detail::canonical_states(g.n(), span)) {
    Configuration c{clocks, crashed};
    for (ProcessorId p = 0; p < g.n(); ++p) {
      if (c.is_crashed(p) || c.clocks[p] < 1) continue;
      bool below = false, above = false;
      for (ProcessorId q : g.neighbors(p)) {
        if (c.clocks[q] == c.clocks[p] - 1) below = true;
        if (c.clocks[q] == c.clocks[p] + 1) above = true;
      }
      if (!(below && above)) continue;
      if (decide(g, c, p).enabled()) {
        out.push_back({ViolationKind::Blocking,
                       "processor " + std::to_string(p) + " enabled in " + format_configuration(c) +
                           " despite neighbors at both adjacent values",
                       detail::witness_trace(g, c, {}, false, decide),
                       p,
                       {}});
      }
    }
  }
  return out;
}

// A processor whose neighbors all sit at its clock or one ahead must be
// enabled for the normal rule and write exactly H_p + 1.
inline std::vector<Violation> check_priority(const Graph& g, uint64_t span,
                                             const std::set<ProcessorId>& crashed = {},
                                             const DecisionFn& decide = uftss_decide) {
  std::vector<Violation> out;
  for (const auto& clocks : detail::canonical_states(g.n(), span)) {
    Configuration c{clocks, crashed};
    for (ProcessorId p = 0; p < g.n(); ++p) {
      if (c.is_crashed(p) || g.neighbors(p).empty()) continue;
      bool pattern = true;
      for (ProcessorId q : g.neighbors(p))
        if (c.clocks[q] != c.clocks[p] && c.clocks[q] != c.clocks[p] + 1) pattern = false;
      if (!pattern) continue;
      RuleDecision d = decide(g, c, p);
      if (d.rule != Rule::N || d.write_value != c.clocks[p] + 1) {
        out.push_back({ViolationKind::Priority,
                       "processor " + std::to_string(p) + " in " + format_configuration(c) +
                           " does not increment under the priority pattern",
                       detail::witness_trace(g, c, {}, false, decide),
                       p,
                       {}});
      }
    }
  }
  return out;
}

// Steps whose selected processors all have local drift >= 2 must strictly
// decrease the potential.
inline std::vector<Violation> check_potential_decrease(const Graph& g, uint64_t span,
                                                       const std::set<ProcessorId>& crashed = {},
                                                       const DecisionFn& decide = uftss_decide) {
  std::vector<Violation> out;
  for (const auto& clocks : detail::canonical_states(g.n(), span)) {
    Configuration c{clocks, crashed};
    if (is_gamma1(g, c)) continue;
    uint32_t high_mask = 0;
    for (ProcessorId p = 0; p < g.n(); ++p)
      if (is_enabled(g, c, p, decide) && node_max_drift(g, c, p) >= 2) high_mask |= 1u << p;
    if (!high_mask) continue;
    Potential before = potential(g, c);
    for (uint32_t sel : detail::locally_central_selections(g, high_mask)) {
      auto selected = detail::mask_to_set(sel, g.n());
      Configuration next = step(g, c, selected, decide);
      if (!potential_less(potential(g, next), before)) {
        out.push_back({ViolationKind::Potential,
                       "potential did not decrease from " + format_configuration(c) +
                           " via selection {" + text::join_u64(selected) + "}",
                       detail::witness_trace(g, c, {selected}, false, decide),
                       std::nullopt,
                       {}});
      }
    }
  }
  return out;
}

// --- Fair-cycle machinery -------------------------------------------------------

namespace detail {

struct EdgeRef {
  uint32_t source;
  uint32_t index;  // into space.edges[source]
};

using EdgePredicate = std::function<bool(uint32_t source, const StateSpace::Transition&)>;

// Tarjan SCC over the alive-state subgraph, iterative.
inline std::vector<std::vector<uint32_t>> sccs(const StateSpace& space,
                                               const std::vector<uint32_t>& alive,
                                               const std::vector<char>& alive_mask,
                                               const EdgePredicate& keep) {
  std::vector<int64_t> index(space.states.size(), -1), low(space.states.size(), 0);
  std::vector<char> on_stack(space.states.size(), 0);
  std::vector<uint32_t> stack;
  std::vector<std::vector<uint32_t>> out;
  int64_t counter = 0;

  struct Frame { uint32_t v; size_t edge; };
  for (uint32_t root : alive) {
    if (index[root] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, ei] = frames.back();
      if (ei < space.edges[v].size()) {
        const auto& t = space.edges[v][ei++];
        uint32_t w = t.target;
        if (!alive_mask[w] || !keep(v, t)) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          std::vector<uint32_t> comp;
          uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp.push_back(w);
          } while (w != v);
          std::sort(comp.begin(), comp.end());
          out.push_back(std::move(comp));
        }
        uint32_t child = v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[child]);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// BFS path (list of edges) between two states inside a restricted subgraph.
inline std::vector<EdgeRef> subgraph_path(const StateSpace& space, const std::vector<char>& alive,
                                          const EdgePredicate& keep, uint32_t from, uint32_t to) {
  if (from == to) return {};
  std::vector<std::optional<EdgeRef>> via(space.states.size());
  std::vector<char> seen(space.states.size(), 0);
  std::deque<uint32_t> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    uint32_t v = queue.front();
    queue.pop_front();
    for (uint32_t i = 0; i < space.edges[v].size(); ++i) {
      const auto& t = space.edges[v][i];
      if (!alive[t.target] || !keep(v, t) || seen[t.target]) continue;
      seen[t.target] = 1;
      via[t.target] = EdgeRef{v, i};
      if (t.target == to) {
        std::vector<EdgeRef> path;
        uint32_t cur = to;
        while (cur != from) {
          path.push_back(*via[cur]);
          cur = via[cur]->source;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(t.target);
    }
  }
  throw std::logic_error("no path inside the component");
}

struct FairCycle {
  uint32_t start;
  std::vector<EdgeRef> edges;  // closed walk from start back to start
};

// Searches for a cycle admissible under the requested fairness. Strong
// fairness needs the Streett-style recursion: a component that enables a
// processor it never executes can still hide an admissible sub-cycle among
// the states where that processor is disabled.
inline std::optional<FairCycle> find_fair_cycle(const StateSpace& space,
                                                std::vector<uint32_t> candidates,
                                                const EdgePredicate& keep, bool strong) {
  if (candidates.empty()) return std::nullopt;
  std::vector<char> alive_mask(space.states.size(), 0);
  for (uint32_t s : candidates) alive_mask[s] = 1;

  uint32_t proc_mask =
      space.graph.n() >= 32 ? ~0u : ((1u << space.graph.n()) - 1);

  for (const auto& comp : sccs(space, candidates, alive_mask, keep)) {
    std::vector<char> in_comp(space.states.size(), 0);
    for (uint32_t s : comp) in_comp[s] = 1;

    uint32_t enabled_union = 0, executed_union = 0, enabled_intersection = proc_mask;
    bool has_edge = false;
    for (uint32_t s : comp) {
      enabled_union |= space.enabled[s];
      enabled_intersection &= space.enabled[s];
      for (const auto& t : space.edges[s])
        if (in_comp[t.target] && keep(s, t)) {
          executed_union |= t.selected;
          has_edge = true;
        }
    }
    if (!has_edge) continue;

    uint32_t violating =
        (strong ? enabled_union : enabled_intersection) & ~executed_union & proc_mask;
    if (violating == 0) {
      // Build a closed walk hitting one executing edge for every processor
      // the component both enables and executes, and one disabling state for
      // every processor enabled only somewhere; that pins down both fairness
      // readings without touching the whole component.
      auto comp_keep = [&](uint32_t src, const StateSpace::Transition& t) {
        return in_comp[t.target] && keep(src, t);
      };
      uint32_t start = comp.front();
      std::vector<EdgeRef> walk;
      uint32_t cur = start;
      auto goto_state = [&](uint32_t dest) {
        for (auto& e : subgraph_path(space, in_comp, keep, cur, dest)) walk.push_back(e);
        cur = dest;
      };
      for (ProcessorId p = 0; p < space.graph.n(); ++p) {
        uint32_t bit = 1u << p;
        if (!(enabled_union & bit)) continue;
        if (executed_union & bit) {
          bool found = false;
          for (uint32_t s : comp) {
            for (uint32_t i = 0; i < space.edges[s].size() && !found; ++i) {
              const auto& t = space.edges[s][i];
              if (comp_keep(s, t) && (t.selected & bit)) {
                goto_state(s);
                walk.push_back({s, i});
                cur = t.target;
                found = true;
              }
            }
            if (found) break;
          }
        } else {
          // Weak fairness only: route through a state where p is disabled.
          for (uint32_t s : comp)
            if (!(space.enabled[s] & bit)) {
              goto_state(s);
              break;
            }
        }
      }
      goto_state(start);
      if (walk.empty()) continue;
      return FairCycle{start, std::move(walk)};
    }
    if (strong) {
      // Any fair cycle in this component must avoid the states enabling the
      // violating processors; recurse on the rest.
      std::vector<uint32_t> rest;
      for (uint32_t s : comp)
        if ((space.enabled[s] & violating) == 0) rest.push_back(s);
      if (rest.size() >= 1 && rest.size() < comp.size()) {
        if (auto found = find_fair_cycle(space, rest, keep, strong)) return found;
      }
    }
  }
  return std::nullopt;
}

inline Trace lasso_witness(const StateSpace& space, const FairCycle& cycle,
                           const std::vector<EdgeRef>& prefix, const DecisionFn& decide) {
  std::vector<std::set<ProcessorId>> selections;
  uint32_t start = prefix.empty() ? cycle.start : prefix.front().source;
  for (const auto& e : prefix)
    selections.push_back(mask_to_set(space.edges[e.source][e.index].selected, space.graph.n()));
  for (const auto& e : cycle.edges)
    selections.push_back(mask_to_set(space.edges[e.source][e.index].selected, space.graph.n()));
  Trace t = witness_trace(space.graph, space.configuration(start), selections, true, decide);
  t.lasso_start = prefix.size();
  return t;
}

}  // namespace detail

// Searches the locally central transition space for a fairness-admissible
// cycle on which some correct processor's raw clock (canonical value plus
// accumulated shift) never increases. `target` restricts the search to one
// starving candidate; `from` restricts the space to states reachable from a
// designated initial configuration.
inline std::optional<Violation> find_starvation_lasso(
    const Graph& g, const std::set<ProcessorId>& crashed, uint64_t span, bool strong_fairness,
    const DecisionFn& decide = uftss_decide, std::optional<ProcessorId> target = std::nullopt,
    const std::optional<Configuration>& from = std::nullopt) {
  StateSpace space = build_state_space(g, crashed, span, decide);

  std::vector<uint32_t> candidates;
  std::vector<std::optional<detail::EdgeRef>> via(space.states.size());
  std::optional<uint32_t> origin;
  if (from) {
    auto [canon, shift] = canonicalize(g, *from);
    origin = space.find(canon.clocks);
    if (!origin) return std::nullopt;  // initial configuration outside span
    std::vector<char> seen(space.states.size(), 0);
    std::deque<uint32_t> queue{*origin};
    seen[*origin] = 1;
    while (!queue.empty()) {
      uint32_t v = queue.front();
      queue.pop_front();
      candidates.push_back(v);
      for (uint32_t i = 0; i < space.edges[v].size(); ++i) {
        uint32_t w = space.edges[v][i].target;
        if (!seen[w]) {
          seen[w] = 1;
          via[w] = detail::EdgeRef{v, i};
          queue.push_back(w);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
  } else {
    candidates.resize(space.states.size());
    for (uint32_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
  }

  std::vector<ProcessorId> probes;
  if (target) probes.push_back(*target);
  else
    for (ProcessorId p = 0; p < g.n(); ++p)
      if (!crashed.count(p)) probes.push_back(p);

  for (ProcessorId p : probes) {
    auto keep = [&space, p](uint32_t source, const StateSpace::Transition& t) {
      return space.raw_delta(source, t, p) <= 0;
    };
    auto cycle = detail::find_fair_cycle(space, candidates, keep, strong_fairness);
    if (!cycle) continue;

    std::vector<detail::EdgeRef> prefix;
    if (origin && *origin != cycle->start) {
      uint32_t cur = cycle->start;
      while (cur != *origin) {
        prefix.push_back(*via[cur]);
        cur = via[cur]->source;
      }
      std::reverse(prefix.begin(), prefix.end());
    }
    Trace witness = detail::lasso_witness(space, *cycle, prefix, decide);

    Violation v{ViolationKind::Starvation, "", witness, p, {}};
    // Everyone whose raw clock never rises along the cycle starves with p.
    for (ProcessorId q = 0; q < g.n(); ++q) {
      if (crashed.count(q)) continue;
      bool rises = false;
      for (const auto& e : cycle->edges)
        if (space.raw_delta(e.source, space.edges[e.source][e.index], q) > 0) rises = true;
      if (!rises) v.starved.push_back(q);
    }
    v.detail = "fairness-admissible cycle starves processors {" + text::join_u64(v.starved) + "}";
    return v;
  }
  return std::nullopt;
}

// Liveness-oriented reachability sweep: reports terminal configurations that
// still contain correct processors (frozen networks) and strongly-fair
// cycles that never touch gamma-1.
inline std::vector<Violation> check_convergence_reachability(
    const Graph& g, const std::set<ProcessorId>& crashed, uint64_t span,
    const DecisionFn& decide = uftss_decide) {
  StateSpace space = build_state_space(g, crashed, span, decide);
  std::vector<Violation> out;

  bool any_correct = crashed.size() < g.n();
  for (uint32_t s = 0; s < space.states.size(); ++s) {
    if (space.enabled[s] == 0 && any_correct) {
      Configuration c = space.configuration(s);
      out.push_back({ViolationKind::Freeze,
                     "terminal configuration " + format_configuration(c) +
                         " freezes all correct processors",
                     detail::witness_trace(g, c, {}, false, decide),
                     std::nullopt,
                     {}});
    }
  }

  std::vector<uint32_t> non_gamma;
  for (uint32_t s = 0; s < space.states.size(); ++s)
    if (!is_gamma1(g, space.configuration(s))) non_gamma.push_back(s);
  std::vector<char> non_gamma_mask(space.states.size(), 0);
  for (uint32_t s : non_gamma) non_gamma_mask[s] = 1;
  auto keep = [&non_gamma_mask](uint32_t, const StateSpace::Transition& t) {
    return non_gamma_mask[t.target] != 0;
  };
  if (auto cycle = detail::find_fair_cycle(space, non_gamma, keep, true)) {
    Trace witness = detail::lasso_witness(space, *cycle, {}, decide);
    out.push_back({ViolationKind::Freeze,
                   "strongly-fair cycle never reaches gamma-1",
                   std::move(witness),
                   std::nullopt,
                   {}});
  }
  return out;
}

}  // namespace unison
