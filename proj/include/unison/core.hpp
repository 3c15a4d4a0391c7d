#pragma once

// Configurations (per-processor clocks plus the crashed set), the two
// synchronization predicates, edge drifts, the drift-count potential with its
// lexicographic order, and canonicalization. All operations here are pure
// functions on immutable values.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "unison/text.hpp"
#include "unison/topology.hpp"

namespace unison {

using ClockValue = uint64_t;

struct Configuration {
  std::vector<ClockValue> clocks;
  std::set<ProcessorId> crashed;

  bool is_crashed(ProcessorId p) const { return crashed.count(p) != 0; }

  bool operator==(const Configuration& o) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void check_consistent(const Graph& g, const Configuration& c) {
  if (c.clocks.size() != g.n())
    throw ConfigError("configuration has " + std::to_string(c.clocks.size()) +
                      " clocks for a graph of " + std::to_string(g.n()) + " processors");
  for (ProcessorId p : c.crashed)
    if (p >= g.n()) throw ConfigError("crashed id " + std::to_string(p) + " out of range");
}

inline uint64_t clock_diff(ClockValue a, ClockValue b) { return a > b ? a - b : b - a; }

inline uint64_t edge_drift(const Configuration& c, ProcessorId p, ProcessorId q) {
  return clock_diff(c.clocks.at(p), c.clocks.at(q));
}

// Max drift over incident edges; 0 for an isolated processor (max over the
// empty set, keeps chain(1) total).
inline uint64_t node_max_drift(const Graph& g, const Configuration& c, ProcessorId p) {
  uint64_t m = 0;
  for (ProcessorId q : g.neighbors(p)) m = std::max(m, edge_drift(c, p, q));
  return m;
}

// Uniformly weakly synchronized: drift <= 1 on every edge, crashed included.
inline bool is_gamma1(const Graph& g, const Configuration& c) {
  check_consistent(g, c);
  for (ProcessorId p = 0; p < g.n(); ++p)
    for (ProcessorId q : g.neighbors(p))
      if (edge_drift(c, p, q) > 1) return false;
  return true;
}

// Weakly synchronized: the drift bound restricted to pairs of non-crashed
// processors.
inline bool is_gamma1_star(const Graph& g, const Configuration& c) {
  check_consistent(g, c);
  for (ProcessorId p = 0; p < g.n(); ++p) {
    if (c.is_crashed(p)) continue;
    for (ProcessorId q : g.neighbors(p)) {
      if (c.is_crashed(q)) continue;
      if (edge_drift(c, p, q) > 1) return false;
    }
  }
  return true;
}

// Sparse drift histogram: counts[d] = number of edges with drift exactly d,
// for d >= 2 only. Empty exactly on gamma-1 configurations.
struct Potential {
  std::map<uint64_t, uint64_t> counts;

  bool empty() const { return counts.empty(); }
  bool operator==(const Potential& o) const = default;
};

inline Potential potential(const Graph& g, const Configuration& c) {
  check_consistent(g, c);
  Potential p;
  for (auto [u, v] : g.edges()) {
    uint64_t d = edge_drift(c, u, v);
    if (d >= 2) ++p.counts[d];
  }
  return p;
}

// Lexicographic order with higher drifts dominating: compare the counts at
// the largest drift where the two histograms differ.
inline bool potential_less(const Potential& a, const Potential& b) {
  auto ia = a.counts.rbegin();
  auto ib = b.counts.rbegin();
  while (ia != a.counts.rend() && ib != b.counts.rend()) {
    if (ia->first > ib->first) return false;  // a has edges at a drift b lacks
    if (ia->first < ib->first) return true;
    if (ia->second != ib->second) return ia->second < ib->second;
    ++ia;
    ++ib;
  }
  return ia == a.counts.rend() && ib != b.counts.rend();
}

// Shifts all clocks down so the minimum lands on 1 (not 0: shift-invariance
// of the protocol only holds away from clock 0). Configurations that already
// contain a 0 clock are returned unchanged. The returned shift is the amount
// subtracted; min clock of the result is in {0, 1}.
inline std::pair<Configuration, uint64_t> canonicalize(const Graph& g, const Configuration& c) {
  check_consistent(g, c);
  ClockValue min = c.clocks.at(0);
  for (ClockValue v : c.clocks) min = std::min(min, v);
  if (min < 1) return {c, 0};
  Configuration out = c;
  for (ClockValue& v : out.clocks) v -= min - 1;
  return {out, min - 1};
}

// Configuration literal: `clocks=1,7,6,7,13 crashed=1` (crashed ids may be
// empty). Used by the CLI, config files, and fixtures.
inline Configuration parse_configuration(std::string_view literal) {
  Configuration c;
  bool have_clocks = false;
  for (auto tok : text::split(literal, ' ')) {
    tok = text::trim(tok);
    if (tok.empty()) continue;
    auto [key, value] = text::split_kv(tok);
    if (key == "clocks") {
      c.clocks = text::parse_u64_list(value);
      have_clocks = true;
    } else if (key == "crashed") {
      for (uint64_t id : text::parse_u64_list(value))
        c.crashed.insert(static_cast<ProcessorId>(id));
    } else {
      throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
  }
  if (!have_clocks) throw ConfigError("configuration literal missing clocks=");
  return c;
}

inline std::string format_configuration(const Configuration& c) {
  return "clocks=" + text::join_u64(c.clocks) + " crashed=" + text::join_u64(c.crashed);
}

}  // namespace unison
