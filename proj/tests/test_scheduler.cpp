#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "unison/engine.hpp"
#include "unison/scheduler.hpp"

using namespace unison;

namespace {

std::set<ProcessorId> enabled_set(const Graph& g, const Configuration& c) {
  std::set<ProcessorId> out;
  for (ProcessorId p = 0; p < g.n(); ++p)
    if (is_enabled(g, c, p, uftss_decide)) out.insert(p);
  return out;
}

}  // namespace

TEST_CASE("daemon legality") {
  Graph g = chain(5);
  std::set<ProcessorId> enabled{0, 1, 3};
  REQUIRE(is_legal_selection(DaemonKind::Central, g, {1}, enabled));
  REQUIRE_FALSE(is_legal_selection(DaemonKind::Central, g, {0, 3}, enabled));
  REQUIRE(is_legal_selection(DaemonKind::LocallyCentral, g, {1, 3}, enabled));
  REQUIRE_FALSE(is_legal_selection(DaemonKind::LocallyCentral, g, {0, 1}, enabled));
  REQUIRE(is_legal_selection(DaemonKind::Distributed, g, {0, 1, 3}, enabled));
  REQUIRE_FALSE(is_legal_selection(DaemonKind::Distributed, g, {}, enabled));
  REQUIRE(is_legal_selection(DaemonKind::Synchronous, g, {0, 1, 3}, enabled));
  REQUIRE_FALSE(is_legal_selection(DaemonKind::Synchronous, g, {0, 1}, enabled));
  REQUIRE_FALSE(is_legal_selection(DaemonKind::Central, g, {2}, enabled));  // not enabled
}

TEST_CASE("lru picks the least recently executed first") {
  Graph g = chain(5);
  Configuration c{{4, 4, 4, 4, 4}, {}};
  std::vector<int64_t> history(5, -1);
  history[1] = 9;

  std::set<ProcessorId> non_adjacent{1, 3};
  LruPolicy lru;
  SelectionContext ctx{g, c, non_adjacent, history, 10};
  REQUIRE(lru.select(DaemonKind::LocallyCentral, ctx) == std::set<ProcessorId>{1, 3});

  history.assign(5, -1);
  history[2] = 9;
  std::set<ProcessorId> adjacent{2, 3};
  SelectionContext ctx2{g, c, adjacent, history, 10};
  REQUIRE(lru.select(DaemonKind::LocallyCentral, ctx2) == std::set<ProcessorId>{3});
  REQUIRE(lru.select(DaemonKind::Central, ctx2) == std::set<ProcessorId>{3});
}

TEST_CASE("every policy emits legal selections under every daemon") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<ClockValue> clock(0, 8);
  Graph g = ring(6);
  for (DaemonKind daemon : {DaemonKind::Central, DaemonKind::LocallyCentral,
                            DaemonKind::Distributed, DaemonKind::Synchronous}) {
    std::vector<std::unique_ptr<SelectionPolicy>> policies;
    policies.push_back(std::make_unique<LruPolicy>());
    policies.push_back(std::make_unique<RoundRobinPolicy>());
    policies.push_back(std::make_unique<SeededRandomPolicy>(5));
    for (auto& policy : policies) {
      std::vector<int64_t> history(g.n(), -1);
      for (uint64_t step_index = 1; step_index <= 200; ++step_index) {
        Configuration c;
        for (uint32_t i = 0; i < g.n(); ++i) c.clocks.push_back(clock(rng));
        auto enabled = enabled_set(g, c);
        if (enabled.empty()) continue;
        SelectionContext ctx{g, c, enabled, history, step_index};
        auto sel = policy->select(daemon, ctx);
        REQUIRE(is_legal_selection(daemon, g, sel, enabled));
        for (ProcessorId p : sel) history[p] = static_cast<int64_t>(step_index);
      }
    }
  }
}

TEST_CASE("lru keeps every processor executing within a bounded window") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<ClockValue> clock(0, 10);
  for (const Graph& g : {chain(5), ring(5)}) {
    uint64_t bound = 4 * g.n();
    Configuration c;
    for (uint32_t i = 0; i < g.n(); ++i) c.clocks.push_back(clock(rng));
    LruPolicy policy;
    std::vector<int64_t> history(g.n(), -1);
    std::vector<uint64_t> streak(g.n(), 0);
    for (uint64_t k = 1; k <= 10000; ++k) {
      auto enabled = enabled_set(g, c);
      REQUIRE_FALSE(enabled.empty());
      SelectionContext ctx{g, c, enabled, history, k};
      auto sel = policy.select(DaemonKind::LocallyCentral, ctx);
      c = step(g, c, sel);
      for (ProcessorId p = 0; p < g.n(); ++p) {
        if (sel.count(p)) streak[p] = 0;
        else if (enabled.count(p)) {
          ++streak[p];
          REQUIRE(streak[p] < bound);
        } else
          streak[p] = 0;
        if (sel.count(p)) history[p] = static_cast<int64_t>(k);
      }
    }
  }
}

TEST_CASE("scripted policy validates each step") {
  Graph g = chain(5);
  Configuration c{{1, 7, 6, 7, 13}, {}};
  std::vector<int64_t> history(5, -1);
  auto enabled = enabled_set(g, c);

  ScriptedPolicy bad_pair{{{0, 1}}};
  SelectionContext ctx{g, c, enabled, history, 1};
  REQUIRE_THROWS_AS(bad_pair.select(DaemonKind::LocallyCentral, ctx), ScriptViolation);

  Configuration blocked{{0, 1, 2, 3, 4}, {}};
  auto enabled2 = enabled_set(g, blocked);
  ScriptedPolicy disabled_member{{{1}}};
  SelectionContext ctx2{g, blocked, enabled2, history, 1};
  REQUIRE_THROWS_AS(disabled_member.select(DaemonKind::LocallyCentral, ctx2), ScriptViolation);

  ScriptedPolicy fine{{{1, 4}}};
  REQUIRE(fine.select(DaemonKind::LocallyCentral, ctx) == std::set<ProcessorId>{1, 4});
  REQUIRE(fine.exhausted(2));
}

TEST_CASE("policy spec strings") {
  REQUIRE(parse_policy("lru")->descriptor() == "lru");
  REQUIRE(parse_policy("round-robin")->descriptor() == "round-robin");
  REQUIRE(parse_policy("random:42")->descriptor() == "random:42");
  REQUIRE_THROWS_AS(parse_policy("fifo"), text::ParseError);
  REQUIRE_THROWS_AS(parse_policy("script:/no/such/file"), text::ParseError);
}

TEST_CASE("neutralization") {
  Graph g = chain(3);
  Configuration before{{4, 5, 5}, {}};
  Configuration after = step(g, before, {2});
  REQUIRE(after.clocks == std::vector<ClockValue>{4, 5, 6});
  REQUIRE(neutralized(g, before, after, 1, false));
  REQUIRE_FALSE(neutralized(g, before, after, 2, true));  // executed

  Configuration pinned{{0, 1, 2}, {}};
  Configuration moved = step(g, pinned, {2});
  REQUIRE_FALSE(neutralized(g, pinned, moved, 1, false));  // disabled before
}

TEST_CASE("cycle classification on the degree-3 rotation") {
  Graph g = y_network(1);
  std::set<ProcessorId> crashed{0};
  std::vector<Configuration> configs{
      {{0, 1, 2, 1, 3}, crashed}, {{0, 1, 2, 2, 3}, crashed}, {{0, 1, 2, 3, 3}, crashed},
      {{0, 1, 2, 3, 1}, crashed}, {{0, 1, 2, 3, 2}, crashed}, {{0, 1, 2, 3, 3}, crashed},
      {{0, 1, 2, 1, 3}, crashed}};
  std::vector<std::set<ProcessorId>> executed{{3}, {3}, {4}, {4}, {4}, {3}};
  FairnessVerdict v = classify_cycle(g, configs, executed);
  REQUIRE(v.strongly_fair_admissible);
  REQUIRE(v.weakly_fair_admissible);
}

TEST_CASE("cycle classification distinguishes the fairness readings") {
  Graph g = chain(3);
  // Processor 2 rotates 3 -> 1 -> 2 -> 3 while nobody else moves.
  std::vector<Configuration> no_crash{
      {{1, 2, 3}, {}}, {{1, 2, 1}, {}}, {{1, 2, 2}, {}}, {{1, 2, 3}, {}}};
  std::vector<std::set<ProcessorId>> executed{{2}, {2}, {2}};

  // Processor 0 is enabled in every configuration yet never executes.
  FairnessVerdict v = classify_cycle(g, no_crash, executed);
  REQUIRE_FALSE(v.weakly_fair_admissible);
  REQUIRE_FALSE(v.strongly_fair_admissible);

  // With processor 0 crashed, processor 1 is enabled at some (not all)
  // configurations and never executes: admissible weakly, not strongly.
  std::vector<Configuration> crashed;
  for (const auto& c : no_crash) crashed.push_back(Configuration{c.clocks, {0}});
  FairnessVerdict w = classify_cycle(g, crashed, executed);
  REQUIRE(w.weakly_fair_admissible);
  REQUIRE_FALSE(w.strongly_fair_admissible);
}

TEST_CASE("strong admissibility implies weak admissibility") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<ClockValue> clock(0, 6);
  Graph g = ring(4);
  int lassos_checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    Configuration c;
    for (uint32_t i = 0; i < g.n(); ++i) c.clocks.push_back(clock(rng));
    SeededRandomPolicy policy{static_cast<uint64_t>(iter)};
    RunOptions opts;
    opts.max_steps = 40;
    opts.canonicalize_steps = true;
    Trace t = run(g, c, policy, {}, opts);
    // Hunt for a repeated canonical configuration and classify that cycle.
    for (size_t i = 0; i < t.num_configurations(); ++i) {
      for (size_t j = i + 1; j < t.num_configurations(); ++j) {
        if (t.configuration_at(i).clocks != t.configuration_at(j).clocks) continue;
        Trace cut = t;
        cut.steps.resize(j);
        FairnessVerdict v = classify_lasso(g, cut, i);
        if (v.strongly_fair_admissible) REQUIRE(v.weakly_fair_admissible);
        ++lassos_checked;
        i = t.num_configurations();
        break;
      }
      if (i >= t.num_configurations()) break;
    }
  }
  REQUIRE(lassos_checked > 20);
}

TEST_CASE("malformed cycles are rejected") {
  Graph g = chain(2);
  std::vector<Configuration> configs{{{1, 1}, {}}, {{2, 1}, {}}};
  std::vector<std::set<ProcessorId>> executed{{0}};
  REQUIRE_THROWS_AS(classify_cycle(g, configs, executed), LassoError);
}
