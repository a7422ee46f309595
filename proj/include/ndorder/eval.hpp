#ifndef NDORDER_EVAL_HPP_
#define NDORDER_EVAL_HPP_

// Symbolic Cholesky factorization of a graph's pattern under an ordering.
// Column counts include the diagonal.

#include <set>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/order_tree.hpp"

namespace ndorder {

struct ElimStats {
  std::vector<Gnum> column_counts;  // indexed by elimination position
  Gnum nnz = 0;
  Gnum opc = 0;

  static ElimStats from_counts(std::vector<Gnum> counts) {
    ElimStats stats;
    stats.column_counts = std::move(counts);
    for (Gnum c : stats.column_counts) {
      stats.nnz += c;
      stats.opc += c * c;
    }
    return stats;
  }
};

inline void require_ordering(const Graph& g, const InvPerm& perm) {
  if (static_cast<Gnum>(perm.size()) != g.vertex_count() || !is_bijection(perm)) {
    throw InputError("ordering is not a bijection over the graph's vertices");
  }
}

/// Elimination tree and row-subtree column counts.
inline ElimStats symbolic_factorize(const Graph& g, const InvPerm& perm) {
  require_ordering(g, perm);
  const Gnum n = g.vertex_count();
  const auto position = invert(perm);

  std::vector<Gnum> parent(static_cast<std::size_t>(n), -1);
  std::vector<Gnum> ancestor(static_cast<std::size_t>(n), -1);
  for (Gnum k = 0; k < n; ++k) {
    for (Gnum u : g.neighbors(perm[k])) {
      // Path-compressed climb from every earlier neighbor.
      for (Gnum i = position[u]; i != -1 && i < k;) {
        const Gnum next = ancestor[i];
        ancestor[i] = k;
        if (next == -1) {
          parent[i] = k;
          break;
        }
        i = next;
      }
    }
  }

  // Row k of the factor is the union of etree paths from its earlier
  // neighbors up to k; each visited column gains one entry.
  std::vector<Gnum> counts(static_cast<std::size_t>(n), 1);
  std::vector<Gnum> visited(static_cast<std::size_t>(n), -1);
  for (Gnum k = 0; k < n; ++k) {
    visited[k] = k;
    for (Gnum u : g.neighbors(perm[k])) {
      for (Gnum i = position[u]; i != -1 && i < k && visited[i] != k; i = parent[i]) {
        ++counts[i];
        visited[i] = k;
      }
    }
  }
  return ElimStats::from_counts(std::move(counts));
}

/// Explicit elimination-graph simulation; slow, used as the reference.
inline ElimStats symbolic_factorize_reference(const Graph& g, const InvPerm& perm) {
  require_ordering(g, perm);
  const Gnum n = g.vertex_count();
  std::vector<std::set<Gnum>> adj(static_cast<std::size_t>(n));
  for (Gnum v = 0; v < n; ++v) {
    for (Gnum u : g.neighbors(v)) adj[v].insert(u);
  }
  std::vector<Gnum> counts;
  counts.reserve(static_cast<std::size_t>(n));
  for (Gnum k = 0; k < n; ++k) {
    const Gnum v = perm[k];
    const std::vector<Gnum> clique(adj[v].begin(), adj[v].end());
    counts.push_back(static_cast<Gnum>(clique.size()) + 1);
    for (Gnum a : clique) {
      adj[a].erase(v);
      for (Gnum b : clique) {
        if (a != b) adj[a].insert(b);
      }
    }
    adj[v].clear();
  }
  return ElimStats::from_counts(std::move(counts));
}

/// NNZ over the lower triangle of the input pattern with its diagonal.
inline double fill_ratio(const ElimStats& stats, const Graph& g) {
  const Gnum base = g.edge_count() + g.vertex_count();
  return base == 0 ? 1.0 : static_cast<double>(stats.nnz) / static_cast<double>(base);
}

}  // namespace ndorder

#endif  // NDORDER_EVAL_HPP_
