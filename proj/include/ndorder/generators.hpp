#ifndef NDORDER_GENERATORS_HPP_
#define NDORDER_GENERATORS_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"

namespace ndorder::gen {

/// k x k grid, row-major numbering.
inline Graph grid2d(Gnum k) {
  if (k < 1) throw InputError("grid2d: size must be positive");
  std::vector<std::pair<Gnum, Gnum>> edges;
  for (Gnum r = 0; r < k; ++r) {
    for (Gnum c = 0; c < k; ++c) {
      const Gnum v = r * k + c;
      if (c + 1 < k) edges.emplace_back(v, v + 1);
      if (r + 1 < k) edges.emplace_back(v, v + k);
    }
  }
  return Graph::from_edges(k * k, edges);
}

/// k x k x k grid, numbered x fastest.
inline Graph grid3d(Gnum k) {
  if (k < 1) throw InputError("grid3d: size must be positive");
  std::vector<std::pair<Gnum, Gnum>> edges;
  for (Gnum z = 0; z < k; ++z) {
    for (Gnum y = 0; y < k; ++y) {
      for (Gnum x = 0; x < k; ++x) {
        const Gnum v = (z * k + y) * k + x;
        if (x + 1 < k) edges.emplace_back(v, v + 1);
        if (y + 1 < k) edges.emplace_back(v, v + k);
        if (z + 1 < k) edges.emplace_back(v, v + k * k);
      }
    }
  }
  return Graph::from_edges(k * k * k, edges);
}

inline Graph path(Gnum n) {
  if (n < 1) throw InputError("path: size must be positive");
  std::vector<std::pair<Gnum, Gnum>> edges;
  for (Gnum v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph::from_edges(n, edges);
}

/// Center 0 joined to `leaves` leaves.
inline Graph star(Gnum leaves) {
  if (leaves < 1) throw InputError("star: leaf count must be positive");
  std::vector<std::pair<Gnum, Gnum>> edges;
  for (Gnum v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
  return Graph::from_edges(leaves + 1, edges);
}

inline Graph complete(Gnum n) {
  if (n < 1) throw InputError("complete: size must be positive");
  std::vector<std::pair<Gnum, Gnum>> edges;
  for (Gnum u = 0; u < n; ++u) {
    for (Gnum v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

inline Graph edgeless(Gnum n) {
  if (n < 1) throw InputError("edgeless: size must be positive");
  return Graph::from_edges(n, {});
}

/// m distinct edges drawn uniformly.
inline Graph random(Gnum n, Gnum m, std::uint64_t seed) {
  if (n < 1) throw InputError("random: size must be positive");
  if (m < 0 || m > n * (n - 1) / 2) throw InputError("random: edge count out of range");
  Rng rng(seed);
  std::set<std::pair<Gnum, Gnum>> chosen;
  while (static_cast<Gnum>(chosen.size()) < m) {
    Gnum u = random_below(rng, n);
    Gnum v = random_below(rng, n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    chosen.emplace(u, v);
  }
  return Graph::from_edges(n, {chosen.begin(), chosen.end()});
}

}  // namespace ndorder::gen

#endif  // NDORDER_GENERATORS_HPP_
