#pragma once

// Immutable undirected graphs with named constructors for the topologies the
// lab works on: chains, rings, the degree-3 "Y" gadget, and arbitrary graphs
// loaded from files. Immutable after construction, freely shareable across
// threads.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "unison/text.hpp"

namespace unison {

using ProcessorId = uint32_t;

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sentinel returned by distance() for a disconnected pair. Constructor graphs
// are connected, so this only shows up when probing raw edge lists.
inline constexpr uint32_t kUnreachable = std::numeric_limits<uint32_t>::max();

class Graph {
 public:
  // Builds a graph from an explicit edge list and validates it: symmetric by
  // construction, irreflexive, no duplicate edges, connected.
  Graph(uint32_t n, const std::vector<std::pair<ProcessorId, ProcessorId>>& edges,
        std::string descriptor)
      : n_(n), adjacency_(n), descriptor_(std::move(descriptor)) {
    if (n == 0) throw TopologyError("graph must have at least one processor");
    std::set<std::pair<ProcessorId, ProcessorId>> seen;
    for (auto [u, v] : edges) {
      if (u >= n || v >= n)
        throw TopologyError("edge endpoint out of range: " + std::to_string(u) + "-" +
                            std::to_string(v));
      if (u == v) throw TopologyError("self-loop at processor " + std::to_string(u));
      auto key = std::minmax(u, v);
      if (!seen.insert(key).second)
        throw TopologyError("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
    if (!connected())
      throw TopologyError("graph is not connected");
  }

  uint32_t n() const { return n_; }
  const std::vector<ProcessorId>& neighbors(ProcessorId p) const { return adjacency_.at(p); }
  const std::string& descriptor() const { return descriptor_; }

  bool has_edge(ProcessorId u, ProcessorId v) const {
    const auto& nb = adjacency_.at(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  std::vector<std::pair<ProcessorId, ProcessorId>> edges() const {
    std::vector<std::pair<ProcessorId, ProcessorId>> out;
    for (ProcessorId u = 0; u < n_; ++u)
      for (ProcessorId v : adjacency_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

 private:
  bool connected() const {
    std::vector<bool> seen(n_, false);
    std::deque<ProcessorId> queue{0};
    seen[0] = true;
    uint32_t count = 1;
    while (!queue.empty()) {
      ProcessorId u = queue.front();
      queue.pop_front();
      for (ProcessorId v : adjacency_[u])
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          queue.push_back(v);
        }
    }
    return count == n_;
  }

  uint32_t n_;
  std::vector<std::vector<ProcessorId>> adjacency_;
  std::string descriptor_;
};

// Path p0 - p1 - ... - p_{n-1}. chain(1) is a single isolated processor.
inline Graph chain(uint32_t n) {
  if (n == 0) throw TopologyError("chain requires n >= 1");
  std::vector<std::pair<ProcessorId, ProcessorId>> edges;
  for (uint32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges, "chain:" + std::to_string(n));
}

// Cycle p0 - p1 - ... - p_{n-1} - p0.
inline Graph ring(uint32_t n) {
  if (n < 3) throw TopologyError("ring requires n >= 3");
  std::vector<std::pair<ProcessorId, ProcessorId>> edges;
  for (uint32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(n - 1, 0);
  return Graph(n, edges, "ring:" + std::to_string(n));
}

// Chain 0..r+1 with two extra leaves attached to node r+1 (ids r+2 and r+3).
// Node r+1 has degree 3 for r >= 1.
inline Graph y_network(uint32_t r) {
  uint32_t n = r + 4;
  std::vector<std::pair<ProcessorId, ProcessorId>> edges;
  for (uint32_t i = 0; i + 1 <= r + 1; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(r + 1, r + 2);
  edges.emplace_back(r + 1, r + 3);
  return Graph(n, edges, "y:" + std::to_string(r));
}

inline uint32_t max_degree(const Graph& g) {
  uint32_t d = 0;
  for (ProcessorId p = 0; p < g.n(); ++p)
    d = std::max<uint32_t>(d, static_cast<uint32_t>(g.neighbors(p).size()));
  return d;
}

// BFS hop count; kUnreachable for a disconnected pair.
inline uint32_t distance(const Graph& g, ProcessorId a, ProcessorId b) {
  if (a >= g.n() || b >= g.n()) throw TopologyError("distance: processor id out of range");
  if (a == b) return 0;
  std::vector<uint32_t> dist(g.n(), kUnreachable);
  std::deque<ProcessorId> queue{a};
  dist[a] = 0;
  while (!queue.empty()) {
    ProcessorId u = queue.front();
    queue.pop_front();
    for (ProcessorId v : g.neighbors(u))
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        if (v == b) return dist[v];
        queue.push_back(v);
      }
  }
  return dist[b];
}

// Graph file format: one `n=<count>` line, then one `edge u v` line per edge.
// `#` starts a comment; blank lines are ignored.
inline Graph read_graph(std::istream& in, const std::string& descriptor = "graph:file") {
  std::string line;
  uint32_t n = 0;
  bool have_n = false;
  std::vector<std::pair<ProcessorId, ProcessorId>> edges;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto payload = text::strip_comment(line);
    if (payload.empty()) continue;
    if (!have_n) {
      auto [key, value] = text::split_kv(payload);
      if (text::trim(key) != "n")
        throw TopologyError("line " + std::to_string(lineno) + ": expected n=<count> first");
      n = static_cast<uint32_t>(text::parse_u64(text::trim(value)));
      have_n = true;
      continue;
    }
    std::vector<std::string_view> parts;
    for (auto tok : text::split(payload, ' '))
      if (!text::trim(tok).empty()) parts.push_back(text::trim(tok));
    if (parts.size() != 3 || parts[0] != "edge")
      throw TopologyError("line " + std::to_string(lineno) + ": expected 'edge u v'");
    edges.emplace_back(static_cast<ProcessorId>(text::parse_u64(parts[1])),
                       static_cast<ProcessorId>(text::parse_u64(parts[2])));
  }
  if (!have_n) throw TopologyError("graph file missing n=<count> line");
  return Graph(n, edges, descriptor);
}

inline void write_graph(std::ostream& out, const Graph& g) {
  out << "n=" << g.n() << "\n";
  for (auto [u, v] : g.edges()) out << "edge " << u << " " << v << "\n";
}

// Topology descriptors used by the CLI and trace headers:
//   chain:<n> | ring:<n> | y:<r> | graph:<n>:<u-v,u-v,...>
inline Graph make_graph(const std::string& descriptor) {
  auto parts = text::split(descriptor, ':');
  if (parts.size() >= 2 && parts[0] == "chain") return chain(static_cast<uint32_t>(text::parse_u64(parts[1])));
  if (parts.size() >= 2 && parts[0] == "ring") return ring(static_cast<uint32_t>(text::parse_u64(parts[1])));
  if (parts.size() >= 2 && parts[0] == "y") return y_network(static_cast<uint32_t>(text::parse_u64(parts[1])));
  if (parts.size() == 3 && parts[0] == "graph") {
    uint32_t n = static_cast<uint32_t>(text::parse_u64(parts[1]));
    std::vector<std::pair<ProcessorId, ProcessorId>> edges;
    if (!text::trim(parts[2]).empty()) {
      for (auto tok : text::split(parts[2], ',')) {
        auto uv = text::split(tok, '-');
        if (uv.size() != 2) throw TopologyError("bad edge token '" + std::string(tok) + "'");
        edges.emplace_back(static_cast<ProcessorId>(text::parse_u64(uv[0])),
                           static_cast<ProcessorId>(text::parse_u64(uv[1])));
      }
    }
    return Graph(n, edges, descriptor);
  }
  throw TopologyError("unknown topology descriptor '" + descriptor + "'");
}

// Self-contained descriptor (edge list embedded) so traces over file-loaded
// graphs replay without the original file.
inline std::string embedded_descriptor(const Graph& g) {
  std::string out = "graph:" + std::to_string(g.n()) + ":";
  bool first = true;
  for (auto [u, v] : g.edges()) {
    if (!first) out += ',';
    out += std::to_string(u) + "-" + std::to_string(v);
    first = false;
  }
  return out;
}

}  // namespace unison
