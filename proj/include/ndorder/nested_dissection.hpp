#ifndef NDORDER_NESTED_DISSECTION_HPP_
#define NDORDER_NESTED_DISSECTION_HPP_

#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/dist_graph.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/min_degree.hpp"
#include "ndorder/order_tree.hpp"
#include "ndorder/partition.hpp"
#include "ndorder/procsim.hpp"
#include "ndorder/separator.hpp"

namespace ndorder {

inline OrderNode make_leaf(NodeKind kind, std::string path, Gnum start, std::vector<Gnum> fragment) {
  OrderNode node;
  node.kind = kind;
  node.path = std::move(path);
  node.start = start;
  node.size = static_cast<Gnum>(fragment.size());
  node.fragment = std::move(fragment);
  return node;
}

inline OrderNode make_internal(std::string path, Gnum start, Gnum size, Gnum n0, Gnum n1) {
  OrderNode node;
  node.kind = NodeKind::internal;
  node.path = std::move(path);
  node.start = start;
  node.size = size;
  node.part0_size = n0;
  node.part1_size = n1;
  return node;
}

/// Minimum degree on the whole graph; `labels` maps local to original indices.
inline void order_min_degree(const Graph& g, const std::vector<Gnum>& labels, Gnum start, const std::string& path,
                             std::vector<OrderNode>& out) {
  std::vector<Gnum> fragment;
  fragment.reserve(labels.size());
  for (Gnum v : min_degree_order(g)) fragment.push_back(labels[v]);
  out.push_back(make_leaf(NodeKind::sequential, path, start, std::move(fragment)));
}

/// Sequential nested dissection down to nd_cutoff vertices, then minimum degree.
inline void sequential_nd(const Graph& g, const std::vector<Gnum>& labels, Gnum start, const std::string& path,
                          Rng& rng, const Strategy& s, std::vector<OrderNode>& out) {
  const Gnum n = g.vertex_count();
  if (n == 0) return;
  if (n <= s.nd_cutoff) {
    order_min_degree(g, labels, start, path, out);
    return;
  }
  Partition p = separator_sequential(g, rng, s);
  for (int attempt = 1; attempt < s.separator_tries; ++attempt) {
    auto candidate = separator_sequential(g, rng, s);
    if (candidate.cost(s.balance_tol) < p.cost(s.balance_tol)) p = std::move(candidate);
  }
  const Gnum n0 = p.count(kPart0);
  const Gnum n1 = p.count(kPart1);
  if (n0 == n || n1 == n) {
    order_min_degree(g, labels, start, path, out);
    return;
  }
  out.push_back(make_internal(path, start, n, n0, n1));

  std::vector<Gnum> separator;
  for (Gnum v = 0; v < n; ++v) {
    if (p.part[v] == kSeparator) separator.push_back(labels[v]);
  }
  if (!separator.empty()) out.push_back(make_leaf(NodeKind::separator, path + 's', start + n0 + n1, std::move(separator)));

  for (PartLabel side : {kPart0, kPart1}) {
    std::vector<char> keep(static_cast<std::size_t>(n));
    for (Gnum v = 0; v < n; ++v) keep[v] = p.part[v] == side;
    std::vector<Gnum> old_of_new;
    const Graph sub = induced(g, keep, &old_of_new);
    std::vector<Gnum> sub_labels(old_of_new.size());
    for (std::size_t i = 0; i < old_of_new.size(); ++i) sub_labels[i] = labels[old_of_new[i]];
    const Gnum sub_start = side == kPart0 ? start : start + n0;
    sequential_nd(sub, sub_labels, sub_start, path + static_cast<char>('0' + side), rng, s, out);
  }
}

/// Collective. Orders the vertices of `g` into [start, start + |V|) and
/// returns this rank's share of the ordering tree.
inline std::vector<OrderNode> nested_dissection(Comm& comm, const DistGraph& g, Gnum start, const std::string& path,
                                                const Strategy& s) {
  std::vector<OrderNode> out;
  const Gnum n = g.global_vertex_count;
  if (n == 0) return out;

  if (comm.size() == 1) {
    const auto central = to_central(g);
    sequential_nd(central.graph, central.labels, start, path, comm.rng(), s, out);
    return out;
  }
  if (n <= s.nd_cutoff) {
    const auto central = centralize(comm, g);
    if (comm.rank() == 0) sequential_nd(central.graph, central.labels, start, path, comm.rng(), s, out);
    return out;
  }

  auto labels = separator_distributed(comm, g, s);
  for (int attempt = 1; attempt < s.separator_tries; ++attempt) {
    auto candidate = separator_distributed(comm, g, s);
    if (distributed_cost(comm, g, candidate, s.balance_tol) < distributed_cost(comm, g, labels, s.balance_tol)) {
      labels = std::move(candidate);
    }
  }
  const Gnum local = g.local_count();
  Gnum counts[3] = {0, 0, 0};
  for (Gnum v = 0; v < local; ++v) ++counts[labels[v]];
  const Gnum n0 = comm.all_reduce_sum(counts[kPart0]);
  const Gnum n1 = comm.all_reduce_sum(counts[kPart1]);
  if (n0 == n || n1 == n) {
    const auto central = centralize(comm, g);
    if (comm.rank() == 0) sequential_nd(central.graph, central.labels, start, path, comm.rng(), s, out);
    return out;
  }
  if (comm.rank() == 0) out.push_back(make_internal(path, start, n, n0, n1));

  // Separator vertices take the top of the interval in ascending global
  // order, which ranks cover contiguously.
  const auto sep_counts = comm.all_gather_value(counts[kSeparator]);
  Gnum sep_offset = start + n0 + n1;
  for (int r = 0; r < comm.rank(); ++r) sep_offset += sep_counts[r];
  std::vector<Gnum> separator;
  for (Gnum v = 0; v < local; ++v) {
    if (labels[v] == kSeparator) separator.push_back(g.vert_label[v]);
  }
  if (!separator.empty()) out.push_back(make_leaf(NodeKind::separator, path + 's', sep_offset, std::move(separator)));

  std::vector<char> flags(static_cast<std::size_t>(local));
  for (Gnum v = 0; v < local; ++v) flags[v] = labels[v] == kPart0;
  auto part0 = induced_subgraph(comm, g, flags);
  for (Gnum v = 0; v < local; ++v) flags[v] = labels[v] == kPart1;
  auto part1 = induced_subgraph(comm, g, flags);

  const int half = Comm::first_half_size(comm.size());
  auto first = fold_to(comm, part0.graph, 0, half);
  auto second = fold_to(comm, part1.graph, half, comm.size());
  const bool in_first = comm.in_first_half();
  Comm sub = comm.split();
  auto child = in_first ? nested_dissection(sub, *first, start, path + '0', s)
                        : nested_dissection(sub, *second, start + n0, path + '1', s);
  out.insert(out.end(), std::make_move_iterator(child.begin()), std::make_move_iterator(child.end()));
  return out;
}

/// Full ordering of a centralized graph on `procs` simulated processes.
inline OrderTree order_tree(const Graph& g, int procs, std::uint64_t seed, const Strategy& s,
                            Schedule schedule = Schedule::parallel) {
  const auto fragments = distribute(g, procs);
  auto per_rank = run_group(
      procs, seed, [&](Comm& comm) { return nested_dissection(comm, fragments[comm.rank()], 0, "", s); }, schedule);
  return OrderTree::merge(per_rank);
}

inline InvPerm order_graph(const Graph& g, int procs, std::uint64_t seed, const Strategy& s,
                           Schedule schedule = Schedule::parallel) {
  return assemble(order_tree(g, procs, seed, s, schedule), g.vertex_count());
}

}  // namespace ndorder

#endif  // NDORDER_NESTED_DISSECTION_HPP_
