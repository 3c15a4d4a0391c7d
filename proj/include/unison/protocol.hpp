#pragma once

// The guarded-command clock protocol: the possible-values macros, the normal
// rule N and the two correction rules C1/C2, behind a decision-function
// interface so the engine and checker stay protocol-agnostic.
//
// A processor p reads only its own clock and its neighbors' clocks. From the
// neighbor clocks it intersects the per-neighbor windows of admissible values
// into one integer interval:
//
//   |interval| >= 2  ->  N   advance: h+1 if it fits, else the interval min
//   |interval| == 0  ->  C1  jump to the floor of the neighbor average,
//                            unless already at its floor or ceiling
//   |interval| == 1  ->  C2  adopt the single admissible value if not there
//
// Exactly one of N / C1 / C2 / not-enabled applies to any local view.

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>

#include "unison/core.hpp"
#include "unison/topology.hpp"

namespace unison {

// Integer interval of clock values. The full-range value stands for the
// intersection over an empty neighbor set (isolated processor); it behaves
// as "size >= 2" everywhere.
class ClockInterval {
 public:
  static ClockInterval all() { return ClockInterval(Kind::All, 0, 0); }
  static ClockInterval none() { return ClockInterval(Kind::Empty, 0, 0); }
  static ClockInterval bounded(ClockValue lo, ClockValue hi) {
    return lo > hi ? none() : ClockInterval(Kind::Bounded, lo, hi);
  }

  bool empty() const { return kind_ == Kind::Empty; }
  bool unbounded() const { return kind_ == Kind::All; }

  ClockValue lo() const { return lo_; }
  ClockValue hi() const { return hi_; }

  // Element count; the unbounded interval reports the max sentinel.
  uint64_t size() const {
    if (kind_ == Kind::Empty) return 0;
    if (kind_ == Kind::All) return std::numeric_limits<uint64_t>::max();
    return hi_ - lo_ + 1;
  }

  bool contains(ClockValue v) const {
    if (kind_ == Kind::Empty) return false;
    if (kind_ == Kind::All) return true;
    return lo_ <= v && v <= hi_;
  }

  ClockInterval intersect(const ClockInterval& o) const {
    if (empty() || o.empty()) return none();
    if (unbounded()) return o;
    if (o.unbounded()) return *this;
    return bounded(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
  }

  bool operator==(const ClockInterval& o) const = default;

 private:
  enum class Kind { Empty, Bounded, All };
  ClockInterval(Kind k, ClockValue lo, ClockValue hi) : kind_(k), lo_(lo), hi_(hi) {}
  Kind kind_;
  ClockValue lo_;
  ClockValue hi_;
};

// Window of values a neighbor at clock h tolerates: [h-1, h+1], clamped at 0.
inline ClockInterval poss(ClockValue h) {
  return ClockInterval::bounded(h >= 1 ? h - 1 : 0, h + 1);
}

// Intersection of poss over a neighbor clock list; the empty list yields the
// unbounded interval.
inline ClockInterval inter(std::span<const ClockValue> neighbor_clocks) {
  ClockInterval iv = ClockInterval::all();
  for (ClockValue h : neighbor_clocks) iv = iv.intersect(poss(h));
  return iv;
}

// Advance within a non-empty interval: h+1 when admissible, else the minimum.
// On the unbounded interval this is always h+1.
inline ClockValue next_value(const ClockInterval& iv, ClockValue h) {
  if (iv.empty()) throw std::logic_error("next_value on an empty interval");
  if (iv.contains(h + 1)) return h + 1;
  if (iv.unbounded()) return h + 1;  // unreachable: all() contains h+1
  return iv.lo();
}

enum class Rule : uint8_t { NotEnabled, N, C1, C2 };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::N: return "N";
    case Rule::C1: return "C1";
    case Rule::C2: return "C2";
    default: return "-";
  }
}

inline Rule parse_rule(std::string_view s) {
  if (s == "N") return Rule::N;
  if (s == "C1") return Rule::C1;
  if (s == "C2") return Rule::C2;
  if (s == "-") return Rule::NotEnabled;
  throw text::ParseError("unknown rule name '" + std::string(s) + "'");
}

struct RuleDecision {
  Rule rule = Rule::NotEnabled;
  ClockValue write_value = 0;  // meaningful unless rule == NotEnabled

  bool enabled() const { return rule != Rule::NotEnabled; }
  bool operator==(const RuleDecision& o) const = default;
};

// Decision function type shared by the engine and checker. Implementations
// must be deterministic and local (read only p's and its neighbors' clocks).
using DecisionFn = std::function<RuleDecision(const Graph&, const Configuration&, ProcessorId)>;

inline RuleDecision uftss_decide(const Graph& g, const Configuration& c, ProcessorId p) {
  const auto& nb = g.neighbors(p);
  ClockValue h = c.clocks.at(p);

  ClockInterval iv = ClockInterval::all();
  ClockValue sum = 0;
  for (ProcessorId q : nb) {
    iv = iv.intersect(poss(c.clocks[q]));
    sum += c.clocks[q];
  }

  if (iv.empty()) {
    // Two neighbors more than 2 apart: correct toward their average. The
    // processor stays put when already at the floor or ceiling of it.
    uint64_t deg = nb.size();
    ClockValue floor_avg = sum / deg;
    ClockValue ceil_avg = (sum + deg - 1) / deg;
    if (h != floor_avg && h != ceil_avg) return {Rule::C1, floor_avg};
    return {Rule::NotEnabled, 0};
  }
  if (!iv.unbounded() && iv.size() == 1) {
    if (h != iv.lo()) return {Rule::C2, iv.lo()};
    return {Rule::NotEnabled, 0};
  }
  // |interval| >= 2 (or no neighbors at all): the normal rule always fires,
  // and always changes the clock: if min(interval) == h then h+1 is also in
  // the interval, so next_value returns h+1 != h.
  return {Rule::N, next_value(iv, h)};
}

inline bool is_enabled(const Graph& g, const Configuration& c, ProcessorId p,
                       const DecisionFn& decide) {
  return !c.is_crashed(p) && decide(g, c, p).enabled();
}

// Perturbs clocks outside p's closed neighborhood and checks the decision is
// unchanged: a randomized probe of the locality contract.
inline bool locality_check(const DecisionFn& decide, const Graph& g, const Configuration& c,
                           ProcessorId p, uint32_t rounds = 32, uint64_t seed = 0x10ca11) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<ClockValue> dist(0, 40);
  RuleDecision base = decide(g, c, p);
  std::vector<bool> local(g.n(), false);
  local[p] = true;
  for (ProcessorId q : g.neighbors(p)) local[q] = true;
  Configuration probe = c;
  for (uint32_t i = 0; i < rounds; ++i) {
    for (ProcessorId q = 0; q < g.n(); ++q)
      if (!local[q]) probe.clocks[q] = dist(rng);
    if (!(decide(g, probe, p) == base)) return false;
  }
  return true;
}

}  // namespace unison
