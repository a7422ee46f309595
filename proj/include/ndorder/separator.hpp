#ifndef NDORDER_SEPARATOR_HPP_
#define NDORDER_SEPARATOR_HPP_

#include <algorithm>
#include <vector>

#include "ndorder/band.hpp"
#include "ndorder/coarsen.hpp"
#include "ndorder/common.hpp"
#include "ndorder/dist_graph.hpp"
#include "ndorder/fm.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/partition.hpp"
#include "ndorder/procsim.hpp"

namespace ndorder {

/// Copies coarse labels onto the fine graph of a sequential level.
inline Partition project(const Graph& fine, const SeqLevel& level, const Partition& coarse) {
  std::vector<PartLabel> labels(static_cast<std::size_t>(fine.vertex_count()));
  for (Gnum v = 0; v < fine.vertex_count(); ++v) labels[v] = coarse.part[level.fine_to_coarse[v]];
  return Partition::from_labels(fine, std::move(labels));
}

/// Projects a partition of the coarsest graph back through the sequential
/// levels, refining at every level.
inline Partition uncoarsen_sequential(const Graph& top, const std::vector<SeqLevel>& levels, Partition p,
                                      const Strategy& s) {
  for (auto k = static_cast<std::ptrdiff_t>(levels.size()) - 1; k >= 0; --k) {
    const Graph& fine = k == 0 ? top : levels[k - 1].coarse;
    p = band_refine(fine, project(fine, levels[k], p), s);
  }
  return p;
}

/// Sequential multilevel vertex separator.
inline Partition separator_sequential(const Graph& g, Rng& rng, const Strategy& s) {
  auto levels = coarsen_sequential(g, rng, s);
  const Graph& coarsest = levels.empty() ? g : levels.back().coarse;
  auto p = initial_separator(coarsest, rng, s);
  return uncoarsen_sequential(g, levels, std::move(p), s);
}

inline SeparatorCost distributed_cost(Comm& comm, const DistGraph& g, const VertexData<PartLabel>& labels,
                                      double balance_tol) {
  Gnum w[3] = {0, 0, 0};
  for (Gnum v = 0; v < g.local_count(); ++v) w[labels[v]] += g.vert_wgt[v];
  return separator_cost(comm.all_reduce_sum(w[0]), comm.all_reduce_sum(w[1]), comm.all_reduce_sum(w[2]),
                        balance_tol);
}

/// Collective. Walks the hierarchy back up from the per-rank coarsest
/// partitions. Coarsening levels project labels through the fine-to-coarse
/// map and run multi-sequential band refinement; fold-dup levels keep the
/// better of the two half-groups' partitions (ties: first half).
/// Returns labels on graphs[0] with valid ghost values.
inline VertexData<PartLabel> uncoarsen(Hierarchy& h, const Partition& bottom, const Strategy& s) {
  VertexData<PartLabel> labels(bottom.part.begin(), bottom.part.end());
  for (auto k = static_cast<std::ptrdiff_t>(h.levels.size()) - 1; k >= 0; --k) {
    Comm& comm = *h.comms[k];
    const DistGraph& fine = h.graphs[k];
    const DistGraph& coarse = h.graphs[k + 1];
    const auto& level = h.levels[k];
    VertexData<PartLabel> fine_labels(static_cast<std::size_t>(fine.slot_count()), kSeparator);

    if (level.action == LevelAction::fold_dup) {
      const auto cost = distributed_cost(*h.comms[k + 1], coarse, labels, s.balance_tol);
      const auto costs = comm.all_gather_value(cost);
      const int second_root = Comm::first_half_size(comm.size());
      const bool first_wins = !(costs[second_root] < costs[0]);
      const bool mine_wins = comm.in_first_half() == first_wins;

      std::vector<Message> outgoing;
      if (mine_wins) {
        const Gnum from = coarse.first_global();
        const Gnum to = from + coarse.local_count();
        for (int r = 0; r < comm.size(); ++r) {
          const Gnum lo = std::max(from, fine.proc_vrt[r]);
          const Gnum hi = std::min(to, fine.proc_vrt[r + 1]);
          if (lo >= hi) continue;
          Packer packer;
          packer.put(lo);
          packer.put_vector(std::vector<PartLabel>(labels.begin() + (lo - from), labels.begin() + (hi - from)));
          outgoing.push_back({comm.rank(), r, tag_labels, packer.take()});
        }
      }
      for (const auto& message : comm.exchange(std::move(outgoing))) {
        Unpacker unpacker(message.payload);
        const Gnum lo = unpacker.get<Gnum>();
        const auto values = unpacker.get_vector<PartLabel>();
        std::copy(values.begin(), values.end(), fine_labels.begin() + (lo - fine.first_global()));
      }
      halo_exchange(comm, fine, fine_labels);
    } else {
      const Gnum n = fine.local_count();
      const Gnum cfirst = coarse.first_global();
      const Gnum clast = cfirst + coarse.local_count();
      for (Gnum v = 0; v < n; ++v) {
        const Gnum c = level.fine_to_coarse[v];
        if (c >= cfirst && c < clast) fine_labels[v] = labels[c - cfirst];
      }
      halo_exchange(comm, fine, fine_labels);
      // Remaining vertices are non-owner halves of cross-rank pairs; the
      // partner is a ghost that now carries the label.
      for (Gnum v = 0; v < n; ++v) {
        const Gnum c = level.fine_to_coarse[v];
        if (c >= cfirst && c < clast) continue;
        const Gnum partner = level.mate[v];
        for (Gnum e = fine.vert_loc[v]; e < fine.vend_loc[v]; ++e) {
          if (fine.edge_loc[e] == partner) fine_labels[v] = fine_labels[fine.edge_gst[e]];
        }
      }
      halo_exchange(comm, fine, fine_labels);
      band_refine_multiseq(comm, fine, fine_labels, s);
    }
    labels = std::move(fine_labels);
  }
  return labels;
}

/// Collective parallel multilevel vertex separator of a distributed graph.
inline VertexData<PartLabel> separator_distributed(Comm& comm, const DistGraph& g, const Strategy& s) {
  auto h = coarsen_to_bottom(comm, g, s);
  Rng& rng = h.comms.back()->rng();
  auto p = initial_separator(h.coarsest(), rng, s);
  p = uncoarsen_sequential(h.bottom, h.seq_levels, std::move(p), s);
  return uncoarsen(h, p, s);
}

}  // namespace ndorder

#endif  // NDORDER_SEPARATOR_HPP_
