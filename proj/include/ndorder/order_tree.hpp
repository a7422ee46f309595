#ifndef NDORDER_ORDER_TREE_HPP_
#define NDORDER_ORDER_TREE_HPP_

// Orderings as trees of inverse-permutation fragments. Every subgraph is
// handed only the start index of its sub-ordering; leaves hold the original
// indices of their vertices in elimination order, and assembling the leaves
// by ascending start index gives the inverse permutation.
//
// Nodes are identified by a path string from the root: '0' and '1' descend
// into the two parts, 's' names a separator leaf.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"

namespace ndorder {

/// Slot k holds the original index of the k-th eliminated vertex.
using InvPerm = std::vector<Gnum>;

enum class NodeKind { internal, separator, sequential };

struct OrderNode {
  NodeKind kind = NodeKind::sequential;
  std::string path;
  Gnum start = 0;
  Gnum size = 0;        // interval length (internal) or fragment length (leaves)
  Gnum part0_size = 0;  // internal only
  Gnum part1_size = 0;  // internal only
  std::vector<Gnum> fragment;

  Gnum separator_start() const { return start + part0_size + part1_size; }
};

struct OrderTree {
  std::vector<OrderNode> internals;  // sorted by path
  std::vector<OrderNode> leaves;     // sorted by start

  /// Merges per-rank node lists. Internal nodes known to several ranks of a
  /// group are kept once; separator leaves may arrive as several fragments.
  static OrderTree merge(const std::vector<std::vector<OrderNode>>& per_rank) {
    OrderTree tree;
    std::map<std::string, OrderNode> internals;
    for (const auto& nodes : per_rank) {
      for (const auto& node : nodes) {
        if (node.kind == NodeKind::internal) {
          internals.emplace(node.path, node);
        } else if (!node.fragment.empty()) {
          tree.leaves.push_back(node);
        }
      }
    }
    for (auto& [path, node] : internals) tree.internals.push_back(std::move(node));
    std::sort(tree.leaves.begin(), tree.leaves.end(),
              [](const OrderNode& a, const OrderNode& b) { return a.start < b.start; });
    return tree;
  }

  Gnum vertex_count() const {
    Gnum n = 0;
    for (const auto& leaf : leaves) n += static_cast<Gnum>(leaf.fragment.size());
    return n;
  }
};

/// Empty string when leaf intervals tile [0, n) exactly.
inline std::string check_tiling(const OrderTree& tree, Gnum n) {
  Gnum next = 0;
  for (const auto& leaf : tree.leaves) {
    if (leaf.start != next) {
      return (leaf.start < next ? "overlap at index " : "gap at index ") + std::to_string(std::min(next, leaf.start));
    }
    next += static_cast<Gnum>(leaf.fragment.size());
  }
  if (next != n) return "leaves cover " + std::to_string(next) + " of " + std::to_string(n) + " slots";
  return {};
}

/// Empty string when every internal node's part subtrees sit strictly below
/// its separator interval, and every leaf lies in its ancestor's sub-interval.
inline std::string check_separator_last(const OrderTree& tree) {
  for (const auto& node : tree.internals) {
    const Gnum sep = node.separator_start();
    if (sep > node.start + node.size) return "separator interval out of node at " + node.path;
    for (const auto& leaf : tree.leaves) {
      if (leaf.path.size() <= node.path.size() || leaf.path.compare(0, node.path.size(), node.path) != 0) continue;
      const Gnum lo = leaf.start;
      const Gnum hi = leaf.start + static_cast<Gnum>(leaf.fragment.size());
      const char branch = leaf.path[node.path.size()];
      Gnum want_lo = node.start, want_hi = node.start + node.part0_size;
      if (branch == '1') {
        want_lo = node.start + node.part0_size;
        want_hi = sep;
      } else if (branch == 's') {
        want_lo = sep;
        want_hi = node.start + node.size;
      }
      if (lo < want_lo || hi > want_hi) return "leaf " + leaf.path + " escapes its interval under " + node.path;
    }
  }
  return {};
}

/// Concatenates leaf fragments by ascending start index.
inline InvPerm assemble(const OrderTree& tree, Gnum n) {
  if (auto problem = check_tiling(tree, n); !problem.empty()) throw InvariantError("assemble: " + problem);
  InvPerm perm(static_cast<std::size_t>(n));
  for (const auto& leaf : tree.leaves) std::copy(leaf.fragment.begin(), leaf.fragment.end(), perm.begin() + leaf.start);
  return perm;
}

inline bool is_bijection(const std::vector<Gnum>& perm) {
  std::vector<char> seen(perm.size(), 0);
  for (Gnum v : perm) {
    if (v < 0 || v >= static_cast<Gnum>(perm.size()) || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

/// Direct permutation: vertex -> elimination rank.
inline std::vector<Gnum> invert(const std::vector<Gnum>& perm) {
  if (!is_bijection(perm)) throw InputError("invert: permutation is not a bijection");
  std::vector<Gnum> inverse(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inverse[perm[k]] = static_cast<Gnum>(k);
  return inverse;
}

}  // namespace ndorder

#endif  // NDORDER_ORDER_TREE_HPP_
