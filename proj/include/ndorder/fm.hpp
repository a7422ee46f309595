#ifndef NDORDER_FM_HPP_
#define NDORDER_FM_HPP_

// Sequential vertex-separator Fiduccia-Mattheyses refinement and the greedy
// region-growing initial separator used on coarsest graphs.

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/partition.hpp"

namespace ndorder {

namespace detail {

// Mutable separator state with an undo log.
class FmState {
 public:
  FmState(const Graph& g, Partition p, std::span<const char> fixed) : g_(g), p_(std::move(p)), fixed_(fixed) {
    for (Gnum v = 0; v < g.vertex_count(); ++v) {
      if (p_.part[v] == kSeparator) separator_.insert(v);
    }
  }

  const Partition& partition() const { return p_; }
  const std::set<Gnum>& separator() const { return separator_; }
  std::size_t log_size() const { return log_.size(); }

  bool is_fixed(Gnum v) const { return !fixed_.empty() && fixed_[v]; }

  // Weight pulled into the separator by moving separator vertex v to `side`,
  // or nullopt if that would drag a fixed vertex into the separator.
  std::optional<Gnum> pulled_weight(Gnum v, PartLabel side) const {
    const PartLabel other = side == kPart0 ? kPart1 : kPart0;
    Gnum pulled = 0;
    for (Gnum u : g_.neighbors(v)) {
      if (p_.part[u] != other) continue;
      if (is_fixed(u)) return std::nullopt;
      pulled += g_.vwgt[u];
    }
    return pulled;
  }

  SeparatorCost cost_after(Gnum v, PartLabel side, Gnum pulled, double tol) const {
    auto w = p_.weight;
    w[side] += g_.vwgt[v];
    w[kSeparator] += pulled - g_.vwgt[v];
    w[side == kPart0 ? kPart1 : kPart0] -= pulled;
    return separator_cost(w[0], w[1], w[2], tol);
  }

  void move(Gnum v, PartLabel side) {
    const PartLabel other = side == kPart0 ? kPart1 : kPart0;
    assign(v, side);
    for (Gnum u : g_.neighbors(v)) {
      if (p_.part[u] == other) assign(u, kSeparator);
    }
  }

  void rollback(std::size_t mark) {
    while (log_.size() > mark) {
      auto [v, old] = log_.back();
      log_.pop_back();
      set_label(v, old);
    }
  }

  void clear_log() { log_.clear(); }

 private:
  void assign(Gnum v, PartLabel label) {
    log_.emplace_back(v, p_.part[v]);
    set_label(v, label);
  }

  void set_label(Gnum v, PartLabel label) {
    const PartLabel old = p_.part[v];
    if (old == label) return;
    p_.weight[old] -= g_.vwgt[v];
    p_.weight[label] += g_.vwgt[v];
    p_.part[v] = label;
    if (old == kSeparator) separator_.erase(v);
    if (label == kSeparator) separator_.insert(v);
  }

  const Graph& g_;
  Partition p_;
  std::span<const char> fixed_;
  std::set<Gnum> separator_;
  std::vector<std::pair<Gnum, PartLabel>> log_;
};

}  // namespace detail

/// Vertex FM. A move takes a separator vertex into part i and pulls its
/// part (1 - i) neighbors into the separator. Each pass allows up to
/// `fm_backtrack` consecutive non-improving moves and then rolls back to the
/// best state seen. Vertices flagged in `fixed` never enter the separator.
/// The returned partition never costs more than the input.
inline Partition fm_refine(const Graph& g, Partition start, const Strategy& s, std::span<const char> fixed = {}) {
  detail::FmState state(g, std::move(start), fixed);
  SeparatorCost best = state.partition().cost(s.balance_tol);
  const Gnum n = g.vertex_count();

  for (int pass = 0; pass < s.fm_pass_max; ++pass) {
    std::vector<char> locked(static_cast<std::size_t>(n), 0);
    std::size_t best_mark = 0;
    bool improved = false;
    int stale = 0;
    state.clear_log();

    while (true) {
      Gnum chosen = -1;
      PartLabel chosen_side = kPart0;
      SeparatorCost chosen_cost = SeparatorCost::invalid();
      for (Gnum v : state.separator()) {
        if (locked[v]) continue;
        for (PartLabel side : {kPart0, kPart1}) {
          auto pulled = state.pulled_weight(v, side);
          if (!pulled) continue;
          auto cost = state.cost_after(v, side, *pulled, s.balance_tol);
          if (cost < chosen_cost) {
            chosen_cost = cost;
            chosen = v;
            chosen_side = side;
          }
        }
      }
      if (chosen < 0) break;

      state.move(chosen, chosen_side);
      locked[chosen] = 1;
      if (chosen_cost < best) {
        best = chosen_cost;
        best_mark = state.log_size();
        improved = true;
        stale = 0;
      } else if (++stale > s.fm_backtrack) {
        break;
      }
    }
    state.rollback(best_mark);
    if (!improved) break;
  }
  return state.partition();
}

/// Randomly applies up to `moves` separator moves. Fixed vertices are respected.
inline Partition perturb(const Graph& g, Partition p, Rng& rng, int moves, std::span<const char> fixed = {}) {
  detail::FmState state(g, std::move(p), fixed);
  for (int k = 0; k < moves; ++k) {
    const auto& sep = state.separator();
    if (sep.empty()) break;
    auto it = sep.begin();
    std::advance(it, random_below(rng, static_cast<Gnum>(sep.size())));
    const Gnum v = *it;
    const PartLabel side = (rng() & 1U) ? kPart1 : kPart0;
    if (state.pulled_weight(v, side)) state.move(v, side);
  }
  return state.partition();
}

/// Greedy graph growing: part 0 grows breadth-first from a random vertex
/// (restarting in a new component whenever the frontier empties) until it
/// holds half the weight; its boundary becomes the separator; FM refines.
/// Best of `tries` attempts.
inline Partition initial_separator(const Graph& g, Rng& rng, const Strategy& s) {
  const Gnum n = g.vertex_count();
  if (n == 0) return Partition{};
  const Gnum total = g.total_weight();

  std::optional<Partition> best;
  SeparatorCost best_cost = SeparatorCost::invalid();
  for (int attempt = 0; attempt < std::max(1, s.tries); ++attempt) {
    std::vector<Gnum> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Gnum{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<PartLabel> part(static_cast<std::size_t>(n), kPart1);
    std::vector<Gnum> queue;
    std::size_t head = 0;
    std::size_t next_seed = 0;
    Gnum grown = 0;
    while (2 * grown < total) {
      if (head == queue.size()) {
        while (next_seed < order.size() && part[order[next_seed]] == kPart0) ++next_seed;
        if (next_seed == order.size()) break;
        const Gnum seed = order[next_seed];
        part[seed] = kPart0;
        queue.push_back(seed);
      }
      const Gnum v = queue[head++];
      grown += g.vwgt[v];
      for (Gnum u : g.neighbors(v)) {
        if (part[u] == kPart1) {
          part[u] = kPart0;
          queue.push_back(u);
        }
      }
    }
    // Queued but unvisited vertices go back to part 1.
    for (std::size_t i = head; i < queue.size(); ++i) part[queue[i]] = kPart1;

    std::vector<PartLabel> labels = part;
    for (Gnum v = 0; v < n; ++v) {
      if (part[v] != kPart0) continue;
      for (Gnum u : g.neighbors(v)) {
        if (part[u] == kPart1) {
          labels[v] = kSeparator;
          break;
        }
      }
    }
    auto candidate = fm_refine(g, Partition::from_labels(g, std::move(labels)), s);
    const auto cost = candidate.cost(s.balance_tol);
    if (!best || cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  }
  return std::move(*best);
}

}  // namespace ndorder

#endif  // NDORDER_FM_HPP_
