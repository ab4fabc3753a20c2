#pragma once

// Weighted digraph and Bellman-Ford shortest paths.
//
// Every edge carries a real cost and an integer secondary weight. Paths are
// ordered lexicographically by (cost, secondary); on router graphs the
// secondary weight is the hop count, so equal-cost routes resolve to the
// fewest hops. Edges with infinite cost are unusable.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lightroute/errors.hpp"

namespace lightroute {

struct WeightedEdge {
  std::uint32_t tail = 0;
  std::uint32_t head = 0;
  double cost = 0.0;
  std::uint64_t secondary = 0;
  std::uint32_t tag = 0;  // caller-defined, e.g. a LinkId
};

class Digraph {
 public:
  explicit Digraph(std::size_t nodes = 0) : nodes_(nodes) {}

  std::size_t add_edge(std::uint32_t tail, std::uint32_t head, double cost, std::uint64_t secondary = 1,
                       std::uint32_t tag = 0) {
    if (tail >= nodes_ || head >= nodes_) throw InvariantViolation("Digraph::add_edge: node out of range");
    edges_.push_back({tail, head, cost, secondary, tag});
    return edges_.size() - 1;
  }

  [[nodiscard]] std::size_t node_count() const { return nodes_; }
  [[nodiscard]] const std::vector<WeightedEdge>& edges() const { return edges_; }
  [[nodiscard]] const WeightedEdge& edge(std::size_t i) const { return edges_.at(i); }
  std::vector<WeightedEdge>& mutable_edges() { return edges_; }

 private:
  std::size_t nodes_;
  std::vector<WeightedEdge> edges_;
};

struct ShortestPaths {
  static constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

  std::uint32_t source = 0;
  std::vector<double> distance;
  std::vector<std::uint64_t> secondary;
  std::vector<std::size_t> pred_edge;

  [[nodiscard]] bool reachable(std::uint32_t node) const { return std::isfinite(distance.at(node)); }

  /// Edge indices from source to `node`; empty if unreachable or node == source.
  [[nodiscard]] std::vector<std::size_t> path_edges(const Digraph& g, std::uint32_t node) const {
    std::vector<std::size_t> rev;
    if (!reachable(node)) return rev;
    std::uint32_t cur = node;
    while (cur != source) {
      std::size_t e = pred_edge.at(cur);
      if (e == kNoEdge || rev.size() > g.node_count())
        throw InvariantViolation("ShortestPaths: broken predecessor chain");
      rev.push_back(e);
      cur = g.edge(e).tail;
    }
    return {rev.rbegin(), rev.rend()};
  }
};

/// Single-source shortest paths. Throws InvariantViolation on a negative or
/// NaN edge cost.
inline ShortestPaths bellman_ford(const Digraph& g, std::uint32_t src) {
  const std::size_t n = g.node_count();
  if (src >= n) throw InvariantViolation("bellman_ford: source out of range");
  for (const auto& e : g.edges())
    if (!(e.cost >= 0.0)) throw InvariantViolation("bellman_ford: negative or NaN edge cost");

  constexpr double inf = std::numeric_limits<double>::infinity();
  ShortestPaths sp;
  sp.source = src;
  sp.distance.assign(n, inf);
  sp.secondary.assign(n, std::numeric_limits<std::uint64_t>::max());
  sp.pred_edge.assign(n, ShortestPaths::kNoEdge);
  sp.distance[src] = 0.0;
  sp.secondary[src] = 0;

  for (std::size_t round = 1; round < n; ++round) {
    bool changed = false;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
      const auto& e = g.edges()[i];
      if (std::isinf(e.cost) || std::isinf(sp.distance[e.tail])) continue;
      const double d = sp.distance[e.tail] + e.cost;
      const std::uint64_t s = sp.secondary[e.tail] + e.secondary;
      if (d < sp.distance[e.head] || (d == sp.distance[e.head] && s < sp.secondary[e.head])) {
        sp.distance[e.head] = d;
        sp.secondary[e.head] = s;
        sp.pred_edge[e.head] = i;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return sp;
}

/// Edge indices of the best src -> dst path under (cost, secondary), with
/// remaining ties going to the lexicographically smallest node sequence.
/// Empty if dst is unreachable or equals src. Fills `cost` when given.
inline std::vector<std::size_t> lexicographic_shortest_path(const Digraph& g, std::uint32_t src, std::uint32_t dst,
                                                            double* cost = nullptr) {
  if (dst >= g.node_count()) throw InvariantViolation("lexicographic_shortest_path: target out of range");
  Digraph rev(g.node_count());
  for (const auto& e : g.edges()) rev.add_edge(e.head, e.tail, e.cost, e.secondary, e.tag);
  const auto to = bellman_ford(rev, dst);
  if (cost) *cost = to.distance.at(src);
  std::vector<std::size_t> path;
  if (!to.reachable(src) || src == dst) return path;

  std::vector<std::vector<std::size_t>> out(g.node_count());
  for (std::size_t i = 0; i < g.edges().size(); ++i) out[g.edges()[i].tail].push_back(i);
  std::uint32_t cur = src;
  while (cur != dst) {
    std::size_t best = ShortestPaths::kNoEdge;
    for (std::size_t i : out[cur]) {
      const auto& e = g.edges()[i];
      if (std::isinf(e.cost) || !to.reachable(e.head)) continue;
      if (e.cost + to.distance[e.head] != to.distance[cur] || e.secondary + to.secondary[e.head] != to.secondary[cur])
        continue;
      if (best == ShortestPaths::kNoEdge || e.head < g.edges()[best].head) best = i;
    }
    if (best == ShortestPaths::kNoEdge || path.size() >= g.node_count())
      throw InvariantViolation("lexicographic_shortest_path: no consistent successor");
    path.push_back(best);
    cur = g.edges()[best].head;
  }
  return path;
}

}  // namespace lightroute
