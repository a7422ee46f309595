#ifndef NDORDER_GRAPH_HPP_
#define NDORDER_GRAPH_HPP_

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"

namespace ndorder {

/// Centralized undirected graph in compressed adjacency form. Every edge is
/// stored as two arcs. Vertex and edge weights are always present.
struct Graph {
  std::vector<Gnum> xadj{0};  // size n + 1
  std::vector<Gnum> adjncy;
  std::vector<Gnum> vwgt;
  std::vector<Gnum> ewgt;

  Gnum vertex_count() const { return static_cast<Gnum>(xadj.size()) - 1; }
  Gnum arc_count() const { return static_cast<Gnum>(adjncy.size()); }
  Gnum edge_count() const { return arc_count() / 2; }
  Gnum degree(Gnum v) const { return xadj[v + 1] - xadj[v]; }

  std::span<const Gnum> neighbors(Gnum v) const {
    return {adjncy.data() + xadj[v], static_cast<std::size_t>(degree(v))};
  }
  std::span<const Gnum> edge_weights(Gnum v) const {
    return {ewgt.data() + xadj[v], static_cast<std::size_t>(degree(v))};
  }

  Gnum total_weight() const { return std::accumulate(vwgt.begin(), vwgt.end(), Gnum{0}); }

  /// Builds from per-vertex neighbor lists with unit weights.
  static Graph from_lists(const std::vector<std::vector<Gnum>>& lists) {
    Graph g;
    g.xadj.assign(1, 0);
    for (const auto& list : lists) {
      g.adjncy.insert(g.adjncy.end(), list.begin(), list.end());
      g.xadj.push_back(static_cast<Gnum>(g.adjncy.size()));
    }
    g.vwgt.assign(lists.size(), 1);
    g.ewgt.assign(g.adjncy.size(), 1);
    return g;
  }

  /// Builds from an undirected edge list with unit weights; duplicates merge.
  static Graph from_edges(Gnum n, const std::vector<std::pair<Gnum, Gnum>>& edges) {
    std::vector<std::vector<Gnum>> lists(static_cast<std::size_t>(n));
    for (auto [u, v] : edges) {
      if (u == v) continue;
      lists[u].push_back(v);
      lists[v].push_back(u);
    }
    for (auto& list : lists) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return from_lists(lists);
  }
};

/// Returns an empty string when the graph is a valid symmetric simple graph.
inline std::string validate(const Graph& g) {
  const Gnum n = g.vertex_count();
  if (n < 0 || g.xadj.front() != 0 || g.xadj.back() != g.arc_count()) return "bad index array";
  if (static_cast<Gnum>(g.vwgt.size()) != n) return "vertex weight array size mismatch";
  if (g.ewgt.size() != g.adjncy.size()) return "edge weight array size mismatch";
  for (Gnum v = 0; v < n; ++v) {
    if (g.xadj[v] > g.xadj[v + 1]) return "decreasing index array at vertex " + std::to_string(v);
    if (g.vwgt[v] < 0) return "negative vertex weight at vertex " + std::to_string(v);
  }
  // Sorted (u, v, w) arcs must equal sorted (v, u, w) arcs.
  std::vector<std::tuple<Gnum, Gnum, Gnum>> arcs, reversed;
  arcs.reserve(g.adjncy.size());
  reversed.reserve(g.adjncy.size());
  for (Gnum v = 0; v < n; ++v) {
    for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const Gnum u = g.adjncy[e];
      if (u < 0 || u >= n) return "neighbor index out of range at vertex " + std::to_string(v);
      if (u == v) return "self-loop at vertex " + std::to_string(v);
      arcs.emplace_back(v, u, g.ewgt[e]);
      reversed.emplace_back(u, v, g.ewgt[e]);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  if (std::adjacent_find(arcs.begin(), arcs.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) == std::get<0>(b) && std::get<1>(a) == std::get<1>(b);
      }) != arcs.end()) {
    return "duplicate edge";
  }
  std::sort(reversed.begin(), reversed.end());
  if (arcs != reversed) return "adjacency is not symmetric";
  return {};
}

/// Sorted list of undirected edges (u < v) with weights; canonical form for comparisons.
inline std::vector<std::tuple<Gnum, Gnum, Gnum>> canonical_edges(const Graph& g) {
  std::vector<std::tuple<Gnum, Gnum, Gnum>> edges;
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      if (v < g.adjncy[e]) edges.emplace_back(v, g.adjncy[e], g.ewgt[e]);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

/// Subgraph induced by the vertices with keep[v] true, numbered in ascending order.
/// `old_of_new` receives the original index of each kept vertex.
inline Graph induced(const Graph& g, std::span<const char> keep, std::vector<Gnum>* old_of_new = nullptr) {
  const Gnum n = g.vertex_count();
  std::vector<Gnum> new_of_old(static_cast<std::size_t>(n), -1);
  std::vector<Gnum> kept;
  for (Gnum v = 0; v < n; ++v) {
    if (keep[v]) {
      new_of_old[v] = static_cast<Gnum>(kept.size());
      kept.push_back(v);
    }
  }
  Graph sub;
  sub.xadj.assign(1, 0);
  for (Gnum v : kept) {
    for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const Gnum u = new_of_old[g.adjncy[e]];
      if (u >= 0) {
        sub.adjncy.push_back(u);
        sub.ewgt.push_back(g.ewgt[e]);
      }
    }
    sub.xadj.push_back(static_cast<Gnum>(sub.adjncy.size()));
    sub.vwgt.push_back(g.vwgt[v]);
  }
  if (old_of_new) *old_of_new = std::move(kept);
  return sub;
}

}  // namespace ndorder

#endif  // NDORDER_GRAPH_HPP_
