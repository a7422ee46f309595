#ifndef NDORDER_BAND_HPP_
#define NDORDER_BAND_HPP_

// Band graphs: the vertices within a given hop distance of a separator, closed
// off by two anchor vertices that stand in for everything left out of each
// part. Refinement on the band cannot move the separator further than the
// band width, and anchor weights keep the balance of the whole graph.

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/dist_graph.hpp"
#include "ndorder/fm.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/partition.hpp"
#include "ndorder/procsim.hpp"

namespace ndorder {

inline constexpr Gnum kFar = std::numeric_limits<Gnum>::max();

struct BandGraph {
  Graph graph;                     // band vertices, then anchor 0, then anchor 1
  std::vector<Gnum> band_to_orig;  // band vertex -> original (global) index
  std::vector<Gnum> distance;      // hop distance to the separator per band vertex
  std::vector<PartLabel> parts;    // initial labels, anchors included
  std::vector<char> fixed;         // anchors only
  Gnum anchor_weight[2] = {0, 0};
  int width = 0;

  Gnum band_count() const { return static_cast<Gnum>(band_to_orig.size()); }
  Gnum anchor(int side) const { return band_count() + side; }
  Partition partition() const { return Partition::from_labels(graph, parts); }
};

namespace detail {

// Band vertices described with original indices, as gathered from all ranks.
struct BandRecords {
  std::vector<Gnum> globals;  // ascending
  std::vector<Gnum> weights;
  std::vector<Gnum> parts;
  std::vector<Gnum> dists;
  std::vector<Gnum> xadj{0};
  std::vector<Gnum> adj;  // original indices of band neighbors
  std::vector<Gnum> wgt;
  Gnum anchor_weight[2] = {0, 0};

  void pack(Packer& packer) const {
    packer.put_vector(globals).put_vector(weights).put_vector(parts).put_vector(dists);
    packer.put_vector(xadj).put_vector(adj).put_vector(wgt);
    packer.put(anchor_weight[0]).put(anchor_weight[1]);
  }
  void append_packed(Unpacker& unpacker) {
    auto g = unpacker.get_vector<Gnum>();
    auto w = unpacker.get_vector<Gnum>();
    auto p = unpacker.get_vector<Gnum>();
    auto d = unpacker.get_vector<Gnum>();
    auto x = unpacker.get_vector<Gnum>();
    auto a = unpacker.get_vector<Gnum>();
    auto ew = unpacker.get_vector<Gnum>();
    const Gnum offset = static_cast<Gnum>(adj.size());
    globals.insert(globals.end(), g.begin(), g.end());
    weights.insert(weights.end(), w.begin(), w.end());
    parts.insert(parts.end(), p.begin(), p.end());
    dists.insert(dists.end(), d.begin(), d.end());
    for (std::size_t i = 1; i < x.size(); ++i) xadj.push_back(offset + x[i]);
    adj.insert(adj.end(), a.begin(), a.end());
    wgt.insert(wgt.end(), ew.begin(), ew.end());
    anchor_weight[0] += unpacker.get<Gnum>();
    anchor_weight[1] += unpacker.get<Gnum>();
  }
};

inline BandGraph assemble_band(const BandRecords& r, int width) {
  BandGraph band;
  band.width = width;
  band.band_to_orig = r.globals;
  band.distance = r.dists;
  band.anchor_weight[0] = r.anchor_weight[0];
  band.anchor_weight[1] = r.anchor_weight[1];
  const Gnum nb = static_cast<Gnum>(r.globals.size());

  std::vector<std::vector<Gnum>> anchor_adj(2);
  Graph& g = band.graph;
  g.xadj.assign(1, 0);
  for (Gnum i = 0; i < nb; ++i) {
    for (Gnum e = r.xadj[i]; e < r.xadj[i + 1]; ++e) {
      auto it = std::lower_bound(r.globals.begin(), r.globals.end(), r.adj[e]);
      check_invariant(it != r.globals.end() && *it == r.adj[e], "band: neighbor outside band");
      g.adjncy.push_back(it - r.globals.begin());
      g.ewgt.push_back(r.wgt[e]);
    }
    const auto part = static_cast<PartLabel>(r.parts[i]);
    if (part != kSeparator && r.dists[i] == width) {
      g.adjncy.push_back(nb + part);
      g.ewgt.push_back(1);
      anchor_adj[part].push_back(i);
    }
    g.xadj.push_back(static_cast<Gnum>(g.adjncy.size()));
    g.vwgt.push_back(r.weights[i]);
    band.parts.push_back(part);
  }
  for (int side = 0; side < 2; ++side) {
    for (Gnum i : anchor_adj[side]) {
      g.adjncy.push_back(i);
      g.ewgt.push_back(1);
    }
    g.xadj.push_back(static_cast<Gnum>(g.adjncy.size()));
    g.vwgt.push_back(r.anchor_weight[side]);
    band.parts.push_back(static_cast<PartLabel>(side));
  }
  band.fixed.assign(static_cast<std::size_t>(nb + 2), 0);
  band.fixed[nb] = band.fixed[nb + 1] = 1;
  return band;
}

}  // namespace detail

/// Hop distance from the separator, capped: vertices further than `width` get kFar.
inline std::vector<Gnum> separator_distances(const Graph& g, std::span<const PartLabel> part, int width) {
  const Gnum n = g.vertex_count();
  std::vector<Gnum> dist(static_cast<std::size_t>(n), kFar);
  std::vector<Gnum> frontier;
  for (Gnum v = 0; v < n; ++v) {
    if (part[v] == kSeparator) {
      dist[v] = 0;
      frontier.push_back(v);
    }
  }
  for (int hop = 1; hop <= width && !frontier.empty(); ++hop) {
    std::vector<Gnum> next;
    for (Gnum v : frontier) {
      for (Gnum u : g.neighbors(v)) {
        if (dist[u] == kFar) {
          dist[u] = hop;
          next.push_back(u);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

/// Centralized band extraction. Empty separator: nullopt (nothing to refine).
inline std::optional<BandGraph> band_extract(const Graph& g, const Partition& p, int width) {
  if (width < 1) throw InvariantError("band_extract: width must be at least 1");
  if (p.count(kSeparator) == 0) return std::nullopt;
  const auto dist = separator_distances(g, p.part, width);
  detail::BandRecords r;
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    if (dist[v] == kFar) {
      r.anchor_weight[p.part[v]] += g.vwgt[v];
      continue;
    }
    r.globals.push_back(v);
    r.weights.push_back(g.vwgt[v]);
    r.parts.push_back(p.part[v]);
    r.dists.push_back(dist[v]);
    for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      if (dist[g.adjncy[e]] == kFar) continue;
      r.adj.push_back(g.adjncy[e]);
      r.wgt.push_back(g.ewgt[e]);
    }
    r.xadj.push_back(static_cast<Gnum>(r.adj.size()));
  }
  return detail::assemble_band(r, width);
}

/// Collective. Distances spread from the separator with one halo exchange per
/// hop; the band is then centralized on every rank. `labels` must hold valid
/// ghost values. Band indices refer to global indices of `g`.
inline std::optional<BandGraph> band_extract(Comm& comm, const DistGraph& g, const VertexData<PartLabel>& labels,
                                             int width) {
  if (width < 1) throw InvariantError("band_extract: width must be at least 1");
  const Gnum n = g.local_count();
  Gnum local_sep = 0;
  VertexData<Gnum> dist(static_cast<std::size_t>(g.slot_count()), kFar);
  for (Gnum v = 0; v < n; ++v) {
    if (labels[v] == kSeparator) {
      dist[v] = 0;
      ++local_sep;
    }
  }
  if (comm.all_reduce_sum(local_sep) == 0) return std::nullopt;

  for (int hop = 1; hop <= width; ++hop) {
    halo_exchange(comm, g, dist);
    std::vector<Gnum> reached;
    for (Gnum v = 0; v < n; ++v) {
      if (dist[v] != kFar) continue;
      for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
        if (dist[g.edge_gst[e]] == hop - 1) {
          reached.push_back(v);
          break;
        }
      }
    }
    for (Gnum v : reached) dist[v] = hop;
  }
  halo_exchange(comm, g, dist);

  detail::BandRecords mine;
  for (Gnum v = 0; v < n; ++v) {
    if (dist[v] == kFar) {
      mine.anchor_weight[labels[v]] += g.vert_wgt[v];
      continue;
    }
    mine.globals.push_back(g.first_global() + v);
    mine.weights.push_back(g.vert_wgt[v]);
    mine.parts.push_back(labels[v]);
    mine.dists.push_back(dist[v]);
    for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
      if (dist[g.edge_gst[e]] == kFar) continue;
      mine.adj.push_back(g.edge_loc[e]);
      mine.wgt.push_back(g.edge_wgt[e]);
    }
    mine.xadj.push_back(static_cast<Gnum>(mine.adj.size()));
  }
  Packer packer;
  mine.pack(packer);
  auto gathered = comm.all_gather(packer.take());
  detail::BandRecords all;
  for (const auto& bytes : gathered) {
    Unpacker unpacker(bytes);
    all.append_packed(unpacker);
  }
  return detail::assemble_band(all, width);
}

/// Refines a centralized partition on its band (or on the whole graph when
/// band_width <= 0) with a single unperturbed FM run.
inline Partition band_refine(const Graph& g, Partition p, const Strategy& s) {
  if (s.band_width <= 0) return fm_refine(g, std::move(p), s);
  auto band = band_extract(g, p, s.band_width);
  if (!band) return p;
  auto refined = fm_refine(band->graph, band->partition(), s, band->fixed);
  for (Gnum i = 0; i < band->band_count(); ++i) p.part[band->band_to_orig[i]] = refined.part[i];
  p.recompute(g);
  return p;
}

/// Collective multi-sequential band refinement. Every rank refines its own
/// centralized copy of the band; all ranks but rank 0 perturb their start.
/// The best result (ties: lowest rank) is projected back to the fragment.
/// `labels` must hold valid ghost values; they are valid again on return.
inline void band_refine_multiseq(Comm& comm, const DistGraph& g, VertexData<PartLabel>& labels, const Strategy& s) {
  std::optional<BandGraph> band;
  if (s.band_width > 0) {
    band = band_extract(comm, g, labels, s.band_width);
    if (!band) return;
  } else {
    // Whole-graph refinement: the "band" is the full graph, without anchors.
    auto central = centralize(comm, g);
    std::vector<PartLabel> all(static_cast<std::size_t>(g.global_vertex_count));
    Packer packer;
    packer.put_vector(std::vector<PartLabel>(labels.begin(), labels.begin() + g.local_count()));
    auto gathered = comm.all_gather(packer.take());
    Gnum at = 0;
    for (const auto& bytes : gathered) {
      Unpacker unpacker(bytes);
      for (PartLabel l : unpacker.get_vector<PartLabel>()) all[at++] = l;
    }
    BandGraph full;
    full.graph = std::move(central.graph);
    full.band_to_orig.resize(all.size());
    for (Gnum i = 0; i < static_cast<Gnum>(all.size()); ++i) full.band_to_orig[i] = i;
    full.parts = std::move(all);
    full.fixed.assign(full.parts.size(), 0);
    if (std::count(full.parts.begin(), full.parts.end(), kSeparator) == 0) return;
    band = std::move(full);
  }

  const bool everyone = band->graph.vertex_count() <= s.band_max;
  Partition candidate = band->partition();
  SeparatorCost cost = SeparatorCost::invalid();
  if (everyone || comm.rank() == 0) {
    if (comm.rank() != 0) candidate = perturb(band->graph, candidate, comm.rng(), s.perturb_moves, band->fixed);
    candidate = fm_refine(band->graph, std::move(candidate), s, band->fixed);
    // An anchor leaving its part invalidates the candidate.
    bool valid = true;
    for (Gnum i = band->band_count(); i < band->graph.vertex_count(); ++i) {
      if (candidate.part[i] != band->parts[i]) valid = false;
    }
    if (valid) cost = candidate.cost(s.balance_tol);
  }

  const auto costs = comm.all_gather_value(cost);
  int winner = 0;
  for (int r = 1; r < comm.size(); ++r) {
    if (costs[r] < costs[winner]) winner = r;
  }
  Bytes payload;
  if (comm.rank() == winner) {
    Packer packer;
    packer.put_vector(candidate.part);
    payload = packer.take();
  }
  payload = comm.broadcast(payload, winner);
  Unpacker unpacker(payload);
  const auto best = unpacker.get_vector<PartLabel>();

  const Gnum first = g.first_global();
  const Gnum last = first + g.local_count();
  auto begin = std::lower_bound(band->band_to_orig.begin(), band->band_to_orig.end(), first);
  for (auto it = begin; it != band->band_to_orig.end() && *it < last; ++it) {
    labels[*it - first] = best[it - band->band_to_orig.begin()];
  }
  halo_exchange(comm, g, labels);
}

}  // namespace ndorder

#endif  // NDORDER_BAND_HPP_
