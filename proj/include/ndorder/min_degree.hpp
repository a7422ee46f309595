#ifndef NDORDER_MIN_DEGREE_HPP_
#define NDORDER_MIN_DEGREE_HPP_

// Minimum degree ordering on a quotient graph. Eliminated vertices become
// elements; a variable's degree is the size of its reach through adjacent
// variables and elements. Elements adjacent to a pivot are absorbed into the
// new element. Ties go to the lowest vertex index.

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"

namespace ndorder {

/// Elimination order of the vertices of `g` (local indices).
inline std::vector<Gnum> min_degree_order(const Graph& g) {
  const Gnum n = g.vertex_count();
  std::vector<std::vector<Gnum>> var_adj(static_cast<std::size_t>(n));   // adjacent variables
  std::vector<std::vector<Gnum>> elem_adj(static_cast<std::size_t>(n));  // adjacent elements
  std::vector<std::vector<Gnum>> members(static_cast<std::size_t>(n));   // variables of each element
  std::vector<char> eliminated(static_cast<std::size_t>(n), 0);
  std::vector<char> absorbed(static_cast<std::size_t>(n), 0);
  for (Gnum v = 0; v < n; ++v) {
    auto nb = g.neighbors(v);
    var_adj[v].assign(nb.begin(), nb.end());
  }

  std::vector<Gnum> mark(static_cast<std::size_t>(n), -1);
  Gnum stamp = 0;
  auto reach = [&](Gnum v, std::vector<Gnum>& out) {
    ++stamp;
    mark[v] = stamp;
    out.clear();
    for (Gnum u : var_adj[v]) {
      if (!eliminated[u] && mark[u] != stamp) {
        mark[u] = stamp;
        out.push_back(u);
      }
    }
    for (Gnum e : elem_adj[v]) {
      for (Gnum u : members[e]) {
        if (!eliminated[u] && mark[u] != stamp) {
          mark[u] = stamp;
          out.push_back(u);
        }
      }
    }
  };

  std::vector<Gnum> degree(static_cast<std::size_t>(n));
  std::set<std::pair<Gnum, Gnum>> heap;
  std::vector<Gnum> scratch;
  for (Gnum v = 0; v < n; ++v) {
    reach(v, scratch);
    degree[v] = static_cast<Gnum>(scratch.size());
    heap.emplace(degree[v], v);
  }

  std::vector<Gnum> order;
  order.reserve(static_cast<std::size_t>(n));
  while (!heap.empty()) {
    const Gnum pivot = heap.begin()->second;
    heap.erase(heap.begin());
    reach(pivot, scratch);
    eliminated[pivot] = 1;
    order.push_back(pivot);

    // The pivot becomes an element holding its reach; its elements are absorbed.
    for (Gnum e : elem_adj[pivot]) absorbed[e] = 1;
    members[pivot] = scratch;
    const std::vector<Gnum> boundary = scratch;
    for (Gnum v : boundary) {
      auto& elems = elem_adj[v];
      elems.erase(std::remove_if(elems.begin(), elems.end(), [&](Gnum e) { return absorbed[e] != 0; }),
                  elems.end());
      elems.push_back(pivot);
      // Variables reachable through the new element need no explicit edge.
      ++stamp;
      for (Gnum u : boundary) mark[u] = stamp;
      auto& vars = var_adj[v];
      vars.erase(std::remove_if(vars.begin(), vars.end(),
                                [&](Gnum u) { return eliminated[u] || mark[u] == stamp; }),
                 vars.end());
    }
    for (Gnum e : elem_adj[pivot]) members[e].clear();
    elem_adj[pivot].clear();
    var_adj[pivot].clear();

    for (Gnum v : boundary) {
      heap.erase({degree[v], v});
      reach(v, scratch);
      degree[v] = static_cast<Gnum>(scratch.size());
      heap.emplace(degree[v], v);
    }
  }
  return order;
}

}  // namespace ndorder

#endif  // NDORDER_MIN_DEGREE_HPP_
