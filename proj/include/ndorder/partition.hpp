#ifndef NDORDER_PARTITION_HPP_
#define NDORDER_PARTITION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"

namespace ndorder {

using PartLabel = std::uint8_t;
inline constexpr PartLabel kPart0 = 0;
inline constexpr PartLabel kPart1 = 1;
inline constexpr PartLabel kSeparator = 2;

/// Quality of a vertex bipartition: balance excess over tolerance first, then
/// separator weight, then raw imbalance. Smaller is better.
struct SeparatorCost {
  double excess = 0.0;
  Gnum wsep = 0;
  Gnum diff = 0;  // |w0 - w1|
  bool valid = true;

  friend bool operator<(const SeparatorCost& a, const SeparatorCost& b) {
    if (a.valid != b.valid) return a.valid;
    return std::tie(a.excess, a.wsep, a.diff) < std::tie(b.excess, b.wsep, b.diff);
  }
  friend bool operator==(const SeparatorCost& a, const SeparatorCost& b) {
    return a.valid == b.valid && a.excess == b.excess && a.wsep == b.wsep && a.diff == b.diff;
  }

  static SeparatorCost invalid() {
    SeparatorCost cost;
    cost.valid = false;
    cost.excess = std::numeric_limits<double>::infinity();
    cost.wsep = std::numeric_limits<Gnum>::max();
    return cost;
  }
};

inline SeparatorCost separator_cost(Gnum w0, Gnum w1, Gnum wsep, double balance_tol) {
  const Gnum total = w0 + w1 + wsep;
  const Gnum diff = w0 > w1 ? w0 - w1 : w1 - w0;
  SeparatorCost cost;
  cost.excess = std::max(0.0, static_cast<double>(diff) - balance_tol * static_cast<double>(total));
  cost.wsep = wsep;
  cost.diff = diff;
  return cost;
}

/// Per-vertex assignment to part 0, part 1 or the separator, with part weights.
struct Partition {
  std::vector<PartLabel> part;
  std::array<Gnum, 3> weight{0, 0, 0};

  Gnum w0() const { return weight[0]; }
  Gnum w1() const { return weight[1]; }
  Gnum wsep() const { return weight[2]; }
  Gnum total() const { return weight[0] + weight[1] + weight[2]; }

  double imbalance() const {
    const Gnum t = total();
    return t == 0 ? 0.0 : static_cast<double>(std::llabs(weight[0] - weight[1])) / static_cast<double>(t);
  }

  SeparatorCost cost(double balance_tol) const { return separator_cost(weight[0], weight[1], weight[2], balance_tol); }

  static Partition from_labels(const Graph& g, std::vector<PartLabel> labels) {
    Partition p;
    p.part = std::move(labels);
    p.recompute(g);
    return p;
  }

  void recompute(const Graph& g) {
    weight = {0, 0, 0};
    for (Gnum v = 0; v < g.vertex_count(); ++v) weight[part[v]] += g.vwgt[v];
  }

  Gnum count(PartLabel label) const { return static_cast<Gnum>(std::count(part.begin(), part.end(), label)); }
};

/// True when no edge joins part 0 to part 1.
inline bool is_separator(const Graph& g, std::span<const PartLabel> part) {
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    if (part[v] == kSeparator) continue;
    for (Gnum u : g.neighbors(v)) {
      if (part[u] != kSeparator && part[u] != part[v]) return false;
    }
  }
  return true;
}

/// Full consistency check: labels in range, separator property, cached weights.
inline bool is_valid(const Graph& g, const Partition& p) {
  if (static_cast<Gnum>(p.part.size()) != g.vertex_count()) return false;
  std::array<Gnum, 3> w{0, 0, 0};
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    if (p.part[v] > kSeparator) return false;
    w[p.part[v]] += g.vwgt[v];
  }
  return w == p.weight && is_separator(g, p.part);
}

}  // namespace ndorder

#endif  // NDORDER_PARTITION_HPP_
