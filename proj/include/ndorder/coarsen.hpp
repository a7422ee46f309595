#ifndef NDORDER_COARSEN_HPP_
#define NDORDER_COARSEN_HPP_

// Multilevel coarsening: heavy-edge matching (sequential and synchronous
// distributed), coarse graph construction, and the fold-dup strategy that
// leaves every rank with a complete coarsest graph.

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/dist_graph.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/procsim.hpp"

namespace ndorder {

// ---------------------------------------------------------------------------
// Sequential.

/// Heavy-edge matching on a centralized graph. Returns the partner of every
/// vertex, or -1. Candidates are drawn at random among the unmatched
/// neighbors joined by the heaviest edges.
inline std::vector<Gnum> match_sequential(const Graph& g, Rng& rng, bool shuffle = true) {
  const Gnum n = g.vertex_count();
  std::vector<Gnum> mate(static_cast<std::size_t>(n), -1);
  std::vector<Gnum> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Gnum{0});
  if (shuffle) std::shuffle(order.begin(), order.end(), rng);
  std::vector<Gnum> candidates;
  for (Gnum v : order) {
    if (mate[v] >= 0) continue;
    Gnum heaviest = -1;
    candidates.clear();
    for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const Gnum u = g.adjncy[e];
      if (mate[u] >= 0) continue;
      if (g.ewgt[e] > heaviest) {
        heaviest = g.ewgt[e];
        candidates.clear();
      }
      if (g.ewgt[e] == heaviest) candidates.push_back(u);
    }
    if (candidates.empty()) continue;
    const Gnum u = candidates[random_below(rng, static_cast<Gnum>(candidates.size()))];
    mate[v] = u;
    mate[u] = v;
  }
  return mate;
}

struct SeqLevel {
  Graph coarse;
  std::vector<Gnum> fine_to_coarse;
};

/// Collapses matched pairs. Coarse vertices are numbered by their lower fine
/// index; parallel edges merge with summed weights and self-loops vanish.
inline SeqLevel coarse_build_sequential(const Graph& g, const std::vector<Gnum>& mate) {
  const Gnum n = g.vertex_count();
  SeqLevel level;
  level.fine_to_coarse.assign(static_cast<std::size_t>(n), -1);
  Gnum cn = 0;
  for (Gnum v = 0; v < n; ++v) {
    if (mate[v] >= 0) check_invariant(mate[mate[v]] == v, "inconsistent matching");
    if (mate[v] < 0 || v < mate[v]) {
      level.fine_to_coarse[v] = cn;
      if (mate[v] >= 0) level.fine_to_coarse[mate[v]] = cn;
      ++cn;
    }
  }
  Graph& c = level.coarse;
  c.xadj.assign(1, 0);
  std::vector<Gnum> slot(static_cast<std::size_t>(cn), -1);
  for (Gnum v = 0; v < n; ++v) {
    if (!(mate[v] < 0 || v < mate[v])) continue;
    const Gnum cv = level.fine_to_coarse[v];
    const Gnum row = static_cast<Gnum>(c.adjncy.size());
    Gnum weight = 0;
    for (Gnum f : {v, mate[v]}) {
      if (f < 0) continue;
      weight += g.vwgt[f];
      for (Gnum e = g.xadj[f]; e < g.xadj[f + 1]; ++e) {
        const Gnum cu = level.fine_to_coarse[g.adjncy[e]];
        if (cu == cv) continue;
        if (slot[cu] < row) {
          slot[cu] = static_cast<Gnum>(c.adjncy.size());
          c.adjncy.push_back(cu);
          c.ewgt.push_back(g.ewgt[e]);
        } else {
          c.ewgt[slot[cu]] += g.ewgt[e];
        }
      }
    }
    c.vwgt.push_back(weight);
    c.xadj.push_back(static_cast<Gnum>(c.adjncy.size()));
  }
  return level;
}

/// Coarsens until the graph has at most `coarsest_size` vertices or a level
/// shrinks by less than `ratio_max`. Level k maps the graph of level k-1 (the
/// input for k = 0) onto levels[k].coarse.
inline std::vector<SeqLevel> coarsen_sequential(const Graph& g, Rng& rng, const Strategy& s) {
  std::vector<SeqLevel> levels;
  const Graph* fine = &g;
  while (fine->vertex_count() > s.coarsest_size) {
    auto mate = match_sequential(*fine, rng, s.match_shuffle);
    auto level = coarse_build_sequential(*fine, mate);
    if (static_cast<double>(level.coarse.vertex_count()) >
        s.ratio_max * static_cast<double>(fine->vertex_count())) {
      break;
    }
    levels.push_back(std::move(level));
    fine = &levels.back().coarse;
  }
  return levels;
}

// ---------------------------------------------------------------------------
// Distributed.

struct Matching {
  std::vector<Gnum> mate;  // per local vertex: partner global index, or -1
  int passes = 0;
};

/// Collective synchronous probabilistic matching. Each pass walks the queue
/// of free local vertices; local candidates are mated at once, remote ones
/// get a request and both ends are locked. Requests are exchanged and granted
/// (lowest requester wins; mutual requests always match), refusals unlock and
/// re-enqueue. Passes stop when fewer than match_stop_fraction of the
/// vertices remain queued, or after match_passes passes.
inline Matching match(Comm& comm, const DistGraph& g, const Strategy& s) {
  enum : std::uint8_t { kFree, kLocked, kMatched, kDiscarded };
  const Gnum n = g.local_count();
  const Gnum first = g.first_global();

  Matching result;
  result.mate.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n), kFree);
  std::vector<Gnum> pending_target(static_cast<std::size_t>(n), -1);
  VertexData<std::uint8_t> taken(static_cast<std::size_t>(g.slot_count()), 0);
  std::vector<char> ghost_locked(static_cast<std::size_t>(g.ghost_count()), 0);

  std::vector<Gnum> queue(static_cast<std::size_t>(n));
  std::iota(queue.begin(), queue.end(), Gnum{0});
  if (s.match_shuffle) std::shuffle(queue.begin(), queue.end(), comm.rng());

  auto& rng = comm.rng();
  std::vector<Gnum> candidates;
  while (true) {
    std::vector<Gnum> next_queue;
    std::map<int, std::vector<Gnum>> requests;  // owner -> (target, requester) pairs
    for (Gnum v : queue) {
      if (state[v] != kFree) continue;
      Gnum heaviest = -1;
      bool blocked = false;
      candidates.clear();
      for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
        const Gnum slot = g.edge_gst[e];
        bool available;
        if (slot < n) {
          available = state[slot] == kFree;
          blocked |= state[slot] == kLocked;
        } else {
          available = !taken[slot] && !ghost_locked[slot - n];
          blocked |= !taken[slot] && ghost_locked[slot - n];
        }
        if (!available) continue;
        if (g.edge_wgt[e] > heaviest) {
          heaviest = g.edge_wgt[e];
          candidates.clear();
        }
        if (g.edge_wgt[e] == heaviest) candidates.push_back(slot);
      }
      if (candidates.empty()) {
        if (blocked) {
          next_queue.push_back(v);
        } else {
          state[v] = kDiscarded;
        }
        continue;
      }
      const Gnum u = candidates[random_below(rng, static_cast<Gnum>(candidates.size()))];
      if (u < n) {
        result.mate[v] = first + u;
        result.mate[u] = first + v;
        state[v] = state[u] = kMatched;
      } else {
        const Gnum target = g.ghost_global[u - n];
        state[v] = kLocked;
        ghost_locked[u - n] = 1;
        pending_target[v] = target;
        auto& list = requests[g.owner_of_global(target)];
        list.push_back(target);
        list.push_back(first + v);
      }
    }

    std::vector<Message> outgoing;
    for (auto& [owner, list] : requests) {
      Packer packer;
      packer.put_vector(list);
      outgoing.push_back({comm.rank(), owner, tag_match_request, packer.take()});
    }
    auto incoming = comm.exchange(std::move(outgoing));

    // target local index -> requesters
    std::map<Gnum, std::vector<Gnum>> wanted;
    std::vector<std::pair<Gnum, Gnum>> received;  // (target, requester), arrival order
    for (const auto& message : incoming) {
      Unpacker unpacker(message.payload);
      auto list = unpacker.get_vector<Gnum>();
      for (std::size_t i = 0; i + 1 < list.size(); i += 2) {
        wanted[list[i] - first].push_back(list[i + 1]);
        received.emplace_back(list[i], list[i + 1]);
      }
    }
    for (auto& [t, requesters] : wanted) {
      if (state[t] == kFree) {
        const Gnum winner = *std::min_element(requesters.begin(), requesters.end());
        result.mate[t] = winner;
        state[t] = kMatched;
      } else if (state[t] == kLocked &&
                 std::find(requesters.begin(), requesters.end(), pending_target[t]) != requesters.end()) {
        result.mate[t] = pending_target[t];
        state[t] = kMatched;
      }
    }

    std::map<int, std::vector<Gnum>> replies;  // requester owner -> (requester, granted) pairs
    for (auto [target, requester] : received) {
      const Gnum t = target - first;
      const bool granted = state[t] == kMatched && result.mate[t] == requester;
      auto& list = replies[g.owner_of_global(requester)];
      list.push_back(requester);
      list.push_back(granted ? 1 : 0);
    }
    outgoing.clear();
    for (auto& [owner, list] : replies) {
      Packer packer;
      packer.put_vector(list);
      outgoing.push_back({comm.rank(), owner, tag_match_reply, packer.take()});
    }
    incoming = comm.exchange(std::move(outgoing));
    for (const auto& message : incoming) {
      Unpacker unpacker(message.payload);
      auto list = unpacker.get_vector<Gnum>();
      for (std::size_t i = 0; i + 1 < list.size(); i += 2) {
        const Gnum v = list[i] - first;
        if (list[i + 1] != 0) {
          check_invariant(state[v] == kMatched ? result.mate[v] == pending_target[v] : state[v] == kLocked,
                          "match: grant for a vertex in an unexpected state");
          result.mate[v] = pending_target[v];
          state[v] = kMatched;
        } else if (state[v] == kLocked) {
          state[v] = kFree;
          next_queue.push_back(v);
        }
      }
    }
    for (Gnum v = 0; v < n; ++v) {
      pending_target[v] = -1;
      taken[v] = (state[v] == kMatched || state[v] == kDiscarded) ? 1 : 0;
    }
    std::fill(ghost_locked.begin(), ghost_locked.end(), 0);
    halo_exchange(comm, g, taken);

    queue = std::move(next_queue);
    ++result.passes;
    const Gnum remaining = comm.all_reduce_sum(static_cast<Gnum>(queue.size()));
    if (remaining == 0 ||
        static_cast<double>(remaining) < s.match_stop_fraction * static_cast<double>(g.global_vertex_count) ||
        result.passes >= s.match_passes) {
      break;
    }
  }
  return result;
}

struct DistCoarsening {
  DistGraph coarse;
  VertexData<Gnum> fine_to_coarse;  // per fine local/ghost slot
  VertexData<Gnum> mate;            // per fine local/ghost slot, global partner or -1
};

/// Collective. Builds the coarse graph of a matching. A cross-rank pair
/// belongs to the rank owning its lower global index; all other coarse
/// vertices stay on their rank.
inline DistCoarsening coarse_build(Comm& comm, const DistGraph& g, const Matching& matching) {
  const Gnum n = g.local_count();
  const Gnum first = g.first_global();
  DistCoarsening out;
  out.mate.assign(static_cast<std::size_t>(g.slot_count()), -1);
  std::copy(matching.mate.begin(), matching.mate.end(), out.mate.begin());
  halo_exchange(comm, g, out.mate);

  // Symmetry and adjacency of the matching; remember the partner's slot.
  std::vector<Gnum> mate_slot(static_cast<std::size_t>(n), -1);
  for (Gnum v = 0; v < n; ++v) {
    const Gnum m = out.mate[v];
    if (m < 0) continue;
    for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
      if (g.edge_loc[e] == m) mate_slot[v] = g.edge_gst[e];
    }
    if (mate_slot[v] < 0 || out.mate[mate_slot[v]] != first + v) {
      throw InvariantError("coarse_build: inconsistent matching at global vertex " + std::to_string(first + v));
    }
  }

  auto owns = [&](Gnum v) { return out.mate[v] < 0 || first + v < out.mate[v]; };
  Gnum owned = 0;
  for (Gnum v = 0; v < n; ++v) owned += owns(v) ? 1 : 0;
  const auto counts = comm.all_gather_value(owned);
  std::vector<Gnum> proc_vrt(comm.size() + 1, 0);
  for (int r = 0; r < comm.size(); ++r) proc_vrt[r + 1] = proc_vrt[r] + counts[r];

  auto& cidx = out.fine_to_coarse;
  cidx.assign(static_cast<std::size_t>(g.slot_count()), -1);
  Gnum next = proc_vrt[comm.rank()];
  std::vector<Gnum> owner_vertex;  // coarse local -> owning fine local vertex
  for (Gnum v = 0; v < n; ++v) {
    if (owns(v)) {
      cidx[v] = next++;
      owner_vertex.push_back(v);
    }
  }
  for (Gnum v = 0; v < n; ++v) {
    if (!owns(v) && mate_slot[v] < n) cidx[v] = cidx[mate_slot[v]];
  }
  halo_exchange(comm, g, cidx);
  for (Gnum v = 0; v < n; ++v) {
    if (!owns(v) && mate_slot[v] >= n) cidx[v] = cidx[mate_slot[v]];
  }
  halo_exchange(comm, g, cidx);

  // Non-owners of cross-rank pairs ship their half to the owner.
  std::map<int, std::vector<Gnum>> shipments;
  for (Gnum v = 0; v < n; ++v) {
    if (owns(v) || mate_slot[v] < n) continue;
    auto& list = shipments[g.owner_of_global(out.mate[v])];
    list.push_back(cidx[v]);
    list.push_back(g.vert_wgt[v]);
    list.push_back(g.vend_loc[v] - g.vert_loc[v]);
    for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
      list.push_back(cidx[g.edge_gst[e]]);
      list.push_back(g.edge_wgt[e]);
    }
  }
  std::vector<Message> outgoing;
  for (auto& [owner, list] : shipments) {
    Packer packer;
    packer.put_vector(list);
    outgoing.push_back({comm.rank(), owner, tag_coarse, packer.take()});
  }
  auto incoming = comm.exchange(std::move(outgoing));

  const Gnum cn = proc_vrt[comm.rank() + 1] - proc_vrt[comm.rank()];
  const Gnum cfirst = proc_vrt[comm.rank()];
  std::vector<Gnum> extra_weight(static_cast<std::size_t>(cn), 0);
  std::vector<std::vector<std::pair<Gnum, Gnum>>> extra_arcs(static_cast<std::size_t>(cn));
  for (const auto& message : incoming) {
    Unpacker unpacker(message.payload);
    auto list = unpacker.get_vector<Gnum>();
    std::size_t i = 0;
    while (i < list.size()) {
      const Gnum c = list[i] - cfirst;
      extra_weight[c] += list[i + 1];
      const Gnum degree = list[i + 2];
      i += 3;
      for (Gnum k = 0; k < degree; ++k, i += 2) extra_arcs[c].emplace_back(list[i], list[i + 1]);
    }
  }

  LocalAdjacency local;
  std::vector<std::pair<Gnum, Gnum>> arcs;
  for (Gnum c = 0; c < cn; ++c) {
    const Gnum v = owner_vertex[c];
    const Gnum cv = cfirst + c;
    arcs = extra_arcs[c];
    Gnum weight = g.vert_wgt[v] + extra_weight[c];
    std::vector<Gnum> members{v};
    if (out.mate[v] >= 0 && mate_slot[v] < n) {
      members.push_back(mate_slot[v]);
      weight += g.vert_wgt[mate_slot[v]];
    }
    for (Gnum f : members) {
      for (Gnum e = g.vert_loc[f]; e < g.vend_loc[f]; ++e) arcs.emplace_back(cidx[g.edge_gst[e]], g.edge_wgt[e]);
    }
    std::sort(arcs.begin(), arcs.end());
    for (std::size_t k = 0; k < arcs.size(); ++k) {
      if (arcs[k].first == cv) continue;
      if (!local.adj.empty() && static_cast<Gnum>(local.adj.size()) > local.xadj.back() &&
          local.adj.back() == arcs[k].first) {
        local.wgt.back() += arcs[k].second;
      } else {
        local.adj.push_back(arcs[k].first);
        local.wgt.push_back(arcs[k].second);
      }
    }
    local.xadj.push_back(static_cast<Gnum>(local.adj.size()));
    local.vwgt.push_back(weight);
    local.labels.push_back(cv);
  }
  const Gnum arc_total = comm.all_reduce_sum(static_cast<Gnum>(local.adj.size()));
  out.coarse = make_fragment(comm.rank(), comm.size(), std::move(proc_vrt), g.base, std::move(local), arc_total);
  return out;
}

enum class LevelAction { coarsen, fold_dup };

/// One distributed level: graphs[k] on comms[k] maps to graphs[k + 1] on comms[k + 1].
struct DistLevel {
  LevelAction action = LevelAction::coarsen;
  VertexData<Gnum> fine_to_coarse;  // coarsen only
  VertexData<Gnum> mate;            // coarsen only
};

/// Per-rank multilevel hierarchy. Distributed graphs first (graphs[0] is the
/// input), then, once the group has shrunk to one rank, a centralized tail.
struct Hierarchy {
  std::vector<std::unique_ptr<Comm>> owned_comms;
  std::vector<Comm*> comms;
  std::vector<DistGraph> graphs;
  std::vector<DistLevel> levels;

  Graph bottom;  // centralized copy of graphs.back()
  std::vector<SeqLevel> seq_levels;

  const Graph& coarsest() const { return seq_levels.empty() ? bottom : seq_levels.back().coarse; }

  std::vector<LevelAction> actions() const {
    std::vector<LevelAction> out;
    for (const auto& level : levels) out.push_back(level.action);
    return out;
  }

  /// Vertices stored by this rank over all levels, centralized tail included.
  Gnum stored_vertices() const {
    Gnum total = 0;
    for (const auto& g : graphs) total += g.local_count();
    for (const auto& level : seq_levels) total += level.coarse.vertex_count();
    return total;
  }
};

/// Collective. Coarsens without folding while the average number of vertices
/// per rank is at least fold_min; below that (or once the graph is small
/// enough, or stalls) the graph is folded and duplicated onto both halves of
/// the group, which then continue independently. On a single rank the
/// sequential tail takes over. Every rank ends with a complete coarsest graph.
inline Hierarchy coarsen_to_bottom(Comm& comm, const DistGraph& g, const Strategy& s) {
  Hierarchy h;
  h.comms.push_back(&comm);
  h.graphs.push_back(g);
  while (h.comms.back()->size() > 1) {
    Comm& current = *h.comms.back();
    const DistGraph& fine = h.graphs.back();
    const Gnum nv = fine.global_vertex_count;
    bool fold_now = nv < s.fold_min * current.size() || nv <= s.coarsest_size;
    if (!fold_now) {
      auto matching = match(current, fine, s);
      auto built = coarse_build(current, fine, matching);
      if (static_cast<double>(built.coarse.global_vertex_count) > s.ratio_max * static_cast<double>(nv)) {
        fold_now = true;
      } else {
        DistLevel level;
        level.action = LevelAction::coarsen;
        level.fine_to_coarse = std::move(built.fine_to_coarse);
        level.mate = std::move(built.mate);
        h.levels.push_back(std::move(level));
        h.graphs.push_back(std::move(built.coarse));
        h.comms.push_back(&current);
      }
    }
    if (fold_now) {
      auto folded = fold(current, fine, FoldSide::first, true);
      h.owned_comms.push_back(std::make_unique<Comm>(std::move(folded.group)));
      DistLevel level;
      level.action = LevelAction::fold_dup;
      h.levels.push_back(std::move(level));
      h.graphs.push_back(std::move(*folded.graph));
      h.comms.push_back(h.owned_comms.back().get());
    }
  }
  h.bottom = to_central(h.graphs.back()).graph;
  h.seq_levels = coarsen_sequential(h.bottom, h.comms.back()->rng(), s);
  return h;
}

}  // namespace ndorder

#endif  // NDORDER_COARSEN_HPP_
