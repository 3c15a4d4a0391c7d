#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "oracles.hpp"
#include "unison/topology.hpp"

using namespace unison;

namespace {

void require_valid(const Graph& g) {
  for (ProcessorId p = 0; p < g.n(); ++p) {
    for (ProcessorId q : g.neighbors(p)) {
      REQUIRE(q != p);
      REQUIRE(g.has_edge(q, p));  // symmetry
    }
  }
  for (ProcessorId p = 0; p < g.n(); ++p)
    REQUIRE(distance(g, 0, p) != kUnreachable);  // connectivity
}

}  // namespace

TEST_CASE("chain construction") {
  REQUIRE(chain(2).edges() == std::vector<std::pair<ProcessorId, ProcessorId>>{{0, 1}});
  auto five = chain(5).edges();
  REQUIRE(five == std::vector<std::pair<ProcessorId, ProcessorId>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  REQUIRE(chain(1).n() == 1);
  REQUIRE(chain(1).edges().empty());
  REQUIRE_THROWS_AS(chain(0), TopologyError);
}

TEST_CASE("ring construction") {
  REQUIRE(ring(3).edges().size() == 3);
  REQUIRE(ring(5).edges().size() == 5);
  for (ProcessorId p = 0; p < 4; ++p) REQUIRE(ring(4).neighbors(p).size() == 2);
  REQUIRE_THROWS_AS(ring(2), TopologyError);
}

TEST_CASE("y network construction") {
  Graph y1 = y_network(1);
  REQUIRE(y1.n() == 5);
  REQUIRE(y1.edges() ==
          std::vector<std::pair<ProcessorId, ProcessorId>>{{0, 1}, {1, 2}, {2, 3}, {2, 4}});
  Graph y0 = y_network(0);
  REQUIRE(y0.n() == 4);
  REQUIRE(y0.neighbors(1) == std::vector<ProcessorId>{0, 2, 3});
  REQUIRE(max_degree(y_network(2)) == 3);
}

TEST_CASE("constructor graphs are symmetric and connected") {
  for (uint32_t n = 1; n <= 7; ++n) require_valid(chain(n));
  for (uint32_t n = 3; n <= 7; ++n) require_valid(ring(n));
  for (uint32_t r = 0; r <= 4; ++r) require_valid(y_network(r));
}

TEST_CASE("degree invariants") {
  for (uint32_t n = 3; n <= 7; ++n) {
    REQUIRE(max_degree(chain(n)) == 2);
    REQUIRE(max_degree(ring(n)) == 2);
  }
  for (uint32_t r = 1; r <= 4; ++r) REQUIRE(max_degree(y_network(r)) == 3);
}

TEST_CASE("distance matches the all-pairs oracle") {
  REQUIRE(distance(chain(5), 0, 4) == 4);
  REQUIRE(max_degree(ring(5)) == 2);
  REQUIRE(distance(y_network(1), 0, 3) == 3);

  for (const Graph& g : {chain(6), ring(6), y_network(2)}) {
    auto all = oracle::floyd_warshall(g);
    for (ProcessorId a = 0; a < g.n(); ++a)
      for (ProcessorId b = 0; b < g.n(); ++b)
        REQUIRE(distance(g, a, b) == all[a][b]);
  }
}

TEST_CASE("graph file round trip") {
  Graph g = y_network(1);
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream in(out.str());
  Graph back = read_graph(in);
  REQUIRE(back.n() == g.n());
  REQUIRE(back.edges() == g.edges());
}

TEST_CASE("graph file accepts comments and rejects malformed input") {
  std::istringstream ok("# a triangle\nn=3\nedge 0 1\nedge 1 2 # two\nedge 2 0\n");
  REQUIRE(read_graph(ok).edges().size() == 3);

  std::istringstream selfloop("n=2\nedge 0 0\n");
  REQUIRE_THROWS_AS(read_graph(selfloop), TopologyError);
  std::istringstream dup("n=2\nedge 0 1\nedge 1 0\n");
  REQUIRE_THROWS_AS(read_graph(dup), TopologyError);
  std::istringstream disconnected("n=4\nedge 0 1\nedge 2 3\n");
  REQUIRE_THROWS_AS(read_graph(disconnected), TopologyError);
  std::istringstream range("n=2\nedge 0 5\n");
  REQUIRE_THROWS_AS(read_graph(range), TopologyError);
}

TEST_CASE("topology descriptors") {
  REQUIRE(make_graph("chain:5").edges() == chain(5).edges());
  REQUIRE(make_graph("ring:4").edges() == ring(4).edges());
  REQUIRE(make_graph("y:1").edges() == y_network(1).edges());
  Graph g = make_graph(embedded_descriptor(y_network(2)));
  REQUIRE(g.edges() == y_network(2).edges());
  REQUIRE_THROWS_AS(make_graph("torus:3"), TopologyError);
}
