#ifndef NDORDER_DIST_GRAPH_HPP_
#define NDORDER_DIST_GRAPH_HPP_

// Distributed graph fragments with dual (global / local+ghost) indexing.
//
// Each rank owns a contiguous range [proc_vrt[rank], proc_vrt[rank + 1]) of
// global indices. Local vertex i is global proc_vrt[rank] + i. Neighbors
// owned elsewhere get ghost indices local_count() .. local_count() +
// ghost_count() - 1, numbered by ascending owner rank and then by ascending
// global index, so halo data can be packed by an in-order walk on the send
// side and received in place on the receive side. Ghost adjacency is never
// stored.
//
// All arrays are 0-based; `base` only affects the external view
// (owner_of(), external_* accessors).

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/payload.hpp"
#include "ndorder/procsim.hpp"

namespace ndorder {

/// One value per local vertex followed by one value per ghost vertex.
template <typename T>
using VertexData = std::vector<T>;

struct DistGraph {
  int rank = 0;
  int procs = 1;
  Gnum base = 0;
  Gnum global_vertex_count = 0;
  Gnum global_arc_count = 0;
  std::vector<Gnum> proc_vrt{0, 0};  // size procs + 1

  std::vector<Gnum> vert_loc;  // adjacency start per local vertex
  std::vector<Gnum> vend_loc;  // adjacency after-end per local vertex
  std::vector<Gnum> edge_loc;  // neighbor global indices
  std::vector<Gnum> edge_gst;  // neighbor local-or-ghost indices
  std::vector<Gnum> edge_wgt;
  std::vector<Gnum> vert_wgt;
  std::vector<Gnum> vert_label;  // original global index, carried through subgraphs and folds

  std::vector<Gnum> ghost_global;  // ghost slot - local_count() -> global index

  // Halo plan. Ghosts owned by neighbor_ranks[k] occupy
  // [recv_start[k], recv_start[k + 1]); send_lists[k] holds the local vertices
  // that rank neighbor_ranks[k] sees as ghosts, ascending.
  std::vector<int> neighbor_ranks;
  std::vector<Gnum> recv_start{0};
  std::vector<std::vector<Gnum>> send_lists;

  Gnum local_count() const { return static_cast<Gnum>(vert_wgt.size()); }
  Gnum ghost_count() const { return static_cast<Gnum>(ghost_global.size()); }
  Gnum slot_count() const { return local_count() + ghost_count(); }
  Gnum first_global() const { return proc_vrt[rank]; }
  Gnum local_arc_count() const { return static_cast<Gnum>(edge_loc.size()); }

  /// Global (0-based) index of a local or ghost slot.
  Gnum global_of(Gnum slot) const {
    return slot < local_count() ? first_global() + slot : ghost_global[slot - local_count()];
  }

  /// Owner of a 0-based global index, by dichotomy search on the range array.
  int owner_of_global(Gnum global) const {
    auto it = std::upper_bound(proc_vrt.begin(), proc_vrt.end(), global);
    return static_cast<int>(it - proc_vrt.begin()) - 1;
  }

  Gnum local_weight() const {
    Gnum total = 0;
    for (Gnum w : vert_wgt) total += w;
    return total;
  }

  // Views honoring `base`.
  Gnum external_vert_loc(Gnum based_local) const { return vert_loc[based_local - base] + base; }
  Gnum external_vend_loc(Gnum based_local) const { return vend_loc[based_local - base] + base; }
  std::vector<Gnum> external_neighbors(Gnum based_local) const {
    std::vector<Gnum> out;
    const Gnum v = based_local - base;
    for (Gnum e = vert_loc[v]; e < vend_loc[v]; ++e) out.push_back(edge_loc[e] + base);
    return out;
  }
  Gnum external_global_of_local(Gnum based_local) const { return proc_vrt[rank] + based_local; }
};

/// Owner rank of a based global index.
inline int owner_of(const DistGraph& g, Gnum based_global) {
  const Gnum global = based_global - g.base;
  if (global < 0 || global >= g.global_vertex_count) {
    throw InvariantError("owner_of: global index " + std::to_string(based_global) + " out of range");
  }
  return g.owner_of_global(global);
}

/// Rank-local adjacency used to assemble a fragment; neighbors are 0-based globals.
struct LocalAdjacency {
  std::vector<Gnum> vwgt;
  std::vector<Gnum> labels;
  std::vector<Gnum> xadj{0};
  std::vector<Gnum> adj;
  std::vector<Gnum> wgt;

  Gnum size() const { return static_cast<Gnum>(vwgt.size()); }

  void pack(Packer& packer) const {
    packer.put_vector(vwgt).put_vector(labels).put_vector(xadj).put_vector(adj).put_vector(wgt);
  }
  static LocalAdjacency unpack(Unpacker& unpacker) {
    LocalAdjacency a;
    a.vwgt = unpacker.get_vector<Gnum>();
    a.labels = unpacker.get_vector<Gnum>();
    a.xadj = unpacker.get_vector<Gnum>();
    a.adj = unpacker.get_vector<Gnum>();
    a.wgt = unpacker.get_vector<Gnum>();
    return a;
  }
  void append(const LocalAdjacency& other) {
    const Gnum offset = static_cast<Gnum>(adj.size());
    vwgt.insert(vwgt.end(), other.vwgt.begin(), other.vwgt.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
    for (std::size_t i = 1; i < other.xadj.size(); ++i) xadj.push_back(offset + other.xadj[i]);
    adj.insert(adj.end(), other.adj.begin(), other.adj.end());
    wgt.insert(wgt.end(), other.wgt.begin(), other.wgt.end());
  }
};

/// Builds rank `rank`'s fragment from its own adjacency only. The graph must be
/// symmetric for the halo plans of different ranks to agree.
inline DistGraph make_fragment(int rank, int procs, std::vector<Gnum> proc_vrt, Gnum base, LocalAdjacency local,
                               Gnum global_arc_count) {
  DistGraph g;
  g.rank = rank;
  g.procs = procs;
  g.base = base;
  g.proc_vrt = std::move(proc_vrt);
  g.global_vertex_count = g.proc_vrt.back();
  g.global_arc_count = global_arc_count;
  const Gnum n = local.size();
  check_invariant(g.proc_vrt[rank + 1] - g.proc_vrt[rank] == n, "fragment size does not match range array");
  g.vert_wgt = std::move(local.vwgt);
  g.vert_label = std::move(local.labels);
  g.edge_loc = std::move(local.adj);
  g.edge_wgt = std::move(local.wgt);
  g.vert_loc.assign(local.xadj.begin(), local.xadj.end() - 1);
  g.vend_loc.assign(local.xadj.begin() + 1, local.xadj.end());

  const Gnum first = g.first_global();
  for (Gnum u : g.edge_loc) {
    check_invariant(u >= 0 && u < g.global_vertex_count, "neighbor index outside all ranges");
    if (u < first || u >= first + n) g.ghost_global.push_back(u);
  }
  std::sort(g.ghost_global.begin(), g.ghost_global.end());
  g.ghost_global.erase(std::unique(g.ghost_global.begin(), g.ghost_global.end()), g.ghost_global.end());

  g.edge_gst.resize(g.edge_loc.size());
  for (std::size_t e = 0; e < g.edge_loc.size(); ++e) {
    const Gnum u = g.edge_loc[e];
    if (u >= first && u < first + n) {
      g.edge_gst[e] = u - first;
    } else {
      auto it = std::lower_bound(g.ghost_global.begin(), g.ghost_global.end(), u);
      g.edge_gst[e] = n + (it - g.ghost_global.begin());
    }
  }

  // Ghosts are sorted by global index, hence by owner.
  g.recv_start.assign(1, n);
  for (Gnum i = 0; i < g.ghost_count(); ++i) {
    const int owner = g.owner_of_global(g.ghost_global[i]);
    if (g.neighbor_ranks.empty() || g.neighbor_ranks.back() != owner) {
      if (!g.neighbor_ranks.empty()) g.recv_start.push_back(n + i);
      g.neighbor_ranks.push_back(owner);
    }
  }
  if (!g.neighbor_ranks.empty()) g.recv_start.push_back(g.slot_count());

  g.send_lists.assign(g.neighbor_ranks.size(), {});
  for (Gnum v = 0; v < n; ++v) {
    for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
      const Gnum slot = g.edge_gst[e];
      if (slot < n) continue;
      auto k = static_cast<std::size_t>(std::upper_bound(g.recv_start.begin(), g.recv_start.end(), slot) -
                                        g.recv_start.begin() - 1);
      auto& list = g.send_lists[k];
      if (list.empty() || list.back() != v) list.push_back(v);
    }
  }
  return g;
}

/// Distributes a graph given as based global adjacency lists. Owners must be
/// non-decreasing in vertex order so that every rank holds a contiguous range.
inline std::vector<DistGraph> build(const std::vector<std::vector<Gnum>>& adjacency, const std::vector<int>& owner,
                                    const std::vector<Gnum>& weights, Gnum base, int procs) {
  const auto n = static_cast<Gnum>(adjacency.size());
  if (procs < 1) throw InputError("build: process count must be at least 1");
  if (static_cast<Gnum>(owner.size()) != n) throw InputError("build: owner assignment does not cover all vertices");
  if (!weights.empty() && static_cast<Gnum>(weights.size()) != n) throw InputError("build: weight array size mismatch");
  if (base != 0 && base != 1) throw InputError("build: base must be 0 or 1");

  std::vector<Gnum> proc_vrt(procs + 1, 0);
  for (Gnum v = 0; v < n; ++v) {
    if (owner[v] < 0 || owner[v] >= procs) throw InputError("build: owner rank out of range");
    if (v > 0 && owner[v] < owner[v - 1]) throw InputError("build: owner assignment must be contiguous per rank");
    ++proc_vrt[owner[v] + 1];
  }
  for (int r = 0; r < procs; ++r) proc_vrt[r + 1] += proc_vrt[r];

  Graph central = Graph::from_lists([&] {
    std::vector<std::vector<Gnum>> lists(adjacency.size());
    for (Gnum v = 0; v < n; ++v) {
      for (Gnum u : adjacency[v]) {
        if (u - base < 0 || u - base >= n) throw InputError("build: neighbor index outside all ranges");
        lists[v].push_back(u - base);
      }
    }
    return lists;
  }());
  if (!weights.empty()) central.vwgt = weights;
  if (auto problem = validate(central); !problem.empty()) throw InputError("build: " + problem);
  for (Gnum w : central.vwgt) {
    if (w < 1) throw InputError("build: vertex weights must be at least 1");
  }

  std::vector<DistGraph> fragments;
  for (int r = 0; r < procs; ++r) {
    LocalAdjacency local;
    for (Gnum v = proc_vrt[r]; v < proc_vrt[r + 1]; ++v) {
      local.vwgt.push_back(central.vwgt[v]);
      local.labels.push_back(v);
      for (Gnum e = central.xadj[v]; e < central.xadj[v + 1]; ++e) {
        local.adj.push_back(central.adjncy[e]);
        local.wgt.push_back(central.ewgt[e]);
      }
      local.xadj.push_back(static_cast<Gnum>(local.adj.size()));
    }
    fragments.push_back(make_fragment(r, procs, proc_vrt, base, std::move(local), central.arc_count()));
  }
  return fragments;
}

/// Contiguous blocks of ceil(n / procs) vertices in vertex order.
inline std::vector<int> block_owners(Gnum n, int procs) {
  const Gnum block = procs > 0 ? (n + procs - 1) / procs : n;
  std::vector<int> owner(static_cast<std::size_t>(n));
  for (Gnum v = 0; v < n; ++v) owner[v] = block == 0 ? 0 : static_cast<int>(v / block);
  return owner;
}

/// Fragments of a centralized graph over contiguous vertex blocks. Weights and labels carried over.
inline std::vector<DistGraph> distribute(const Graph& g, int procs, const std::vector<Gnum>* labels = nullptr) {
  const auto owner = block_owners(g.vertex_count(), procs);
  std::vector<Gnum> proc_vrt(procs + 1, 0);
  for (int o : owner) ++proc_vrt[o + 1];
  for (int r = 0; r < procs; ++r) proc_vrt[r + 1] += proc_vrt[r];
  std::vector<DistGraph> fragments;
  for (int r = 0; r < procs; ++r) {
    LocalAdjacency local;
    for (Gnum v = proc_vrt[r]; v < proc_vrt[r + 1]; ++v) {
      local.vwgt.push_back(g.vwgt[v]);
      local.labels.push_back(labels ? (*labels)[v] : v);
      for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        local.adj.push_back(g.adjncy[e]);
        local.wgt.push_back(g.ewgt[e]);
      }
      local.xadj.push_back(static_cast<Gnum>(local.adj.size()));
    }
    fragments.push_back(make_fragment(r, procs, proc_vrt, 0, std::move(local), g.arc_count()));
  }
  return fragments;
}

inline LocalAdjacency local_adjacency(const DistGraph& g) {
  LocalAdjacency local;
  local.vwgt = g.vert_wgt;
  local.labels = g.vert_label;
  for (Gnum v = 0; v < g.local_count(); ++v) {
    for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
      local.adj.push_back(g.edge_loc[e]);
      local.wgt.push_back(g.edge_wgt[e]);
    }
    local.xadj.push_back(static_cast<Gnum>(local.adj.size()));
  }
  return local;
}

enum Tag : int {
  tag_halo = 1,
  tag_fold = 2,
  tag_gather = 3,
  tag_match_request = 4,
  tag_match_reply = 5,
  tag_coarse = 6,
  tag_labels = 7,
};

/// Collective. Copies every owner's local value into the ghost slots of its
/// neighbors. Local slots are left untouched.
template <typename T>
requires std::is_trivially_copyable_v<T>
void halo_exchange(Comm& comm, const DistGraph& g, VertexData<T>& data) {
  if (static_cast<Gnum>(data.size()) != g.slot_count()) {
    throw InvariantError("halo_exchange: data length " + std::to_string(data.size()) + " != local+ghost count " +
                         std::to_string(g.slot_count()));
  }
  std::vector<Message> outgoing;
  for (std::size_t k = 0; k < g.neighbor_ranks.size(); ++k) {
    std::vector<T> values;
    values.reserve(g.send_lists[k].size());
    for (Gnum v : g.send_lists[k]) values.push_back(data[v]);
    Packer packer;
    packer.put_vector(values);
    outgoing.push_back({comm.rank(), g.neighbor_ranks[k], tag_halo, packer.take()});
  }
  auto incoming = comm.exchange(std::move(outgoing));
  for (const auto& message : incoming) {
    auto it = std::lower_bound(g.neighbor_ranks.begin(), g.neighbor_ranks.end(), message.source);
    check_invariant(it != g.neighbor_ranks.end() && *it == message.source, "halo_exchange: unexpected sender");
    const auto k = static_cast<std::size_t>(it - g.neighbor_ranks.begin());
    Unpacker unpacker(message.payload);
    auto values = unpacker.get_vector<T>();
    check_invariant(static_cast<Gnum>(values.size()) == g.recv_start[k + 1] - g.recv_start[k],
                    "halo_exchange: ghost range size mismatch");
    std::copy(values.begin(), values.end(), data.begin() + g.recv_start[k]);
  }
}

struct InducedSubgraph {
  DistGraph graph;
  VertexData<Gnum> new_index;  // per old local/ghost slot: new global index, or -1
};

/// Collective. Keeps the flagged local vertices on their ranks and renumbers
/// them rank-major in ascending old global order.
inline InducedSubgraph induced_subgraph(Comm& comm, const DistGraph& g, std::span<const char> flags) {
  check_invariant(static_cast<Gnum>(flags.size()) >= g.local_count(), "induced_subgraph: flag array too short");
  Gnum kept = 0;
  for (Gnum v = 0; v < g.local_count(); ++v) kept += flags[v] ? 1 : 0;
  const auto counts = comm.all_gather_value(kept);
  std::vector<Gnum> proc_vrt(comm.size() + 1, 0);
  for (int r = 0; r < comm.size(); ++r) proc_vrt[r + 1] = proc_vrt[r] + counts[r];

  InducedSubgraph result;
  result.new_index.assign(static_cast<std::size_t>(g.slot_count()), -1);
  Gnum next = proc_vrt[comm.rank()];
  for (Gnum v = 0; v < g.local_count(); ++v) {
    if (flags[v]) result.new_index[v] = next++;
  }
  halo_exchange(comm, g, result.new_index);

  LocalAdjacency local;
  for (Gnum v = 0; v < g.local_count(); ++v) {
    if (!flags[v]) continue;
    local.vwgt.push_back(g.vert_wgt[v]);
    local.labels.push_back(g.vert_label[v]);
    for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
      const Gnum u = result.new_index[g.edge_gst[e]];
      if (u >= 0) {
        local.adj.push_back(u);
        local.wgt.push_back(g.edge_wgt[e]);
      }
    }
    local.xadj.push_back(static_cast<Gnum>(local.adj.size()));
  }
  const Gnum arcs = comm.all_reduce_sum(static_cast<Gnum>(local.adj.size()));
  result.graph = make_fragment(comm.rank(), comm.size(), std::move(proc_vrt), g.base, std::move(local), arcs);
  return result;
}

/// Start of receiver j's range when n vertices are spread evenly over q receivers.
inline Gnum balanced_start(Gnum n, int q, int j) { return j * (n / q) + std::min<Gnum>(j, n % q); }

/// Collective. Redistributes the graph onto ranks [lo, hi) of `comm`, filling
/// receivers to equal vertex counts (within one) in ascending global order.
/// Global numbering is preserved. Ranks outside [lo, hi) get nothing.
inline std::optional<DistGraph> fold_to(Comm& comm, const DistGraph& g, int lo, int hi) {
  check_invariant(0 <= lo && lo < hi && hi <= comm.size(), "fold_to: bad receiver range");
  const int q = hi - lo;
  const Gnum n = g.global_vertex_count;
  std::vector<Gnum> proc_vrt(q + 1);
  for (int j = 0; j <= q; ++j) proc_vrt[j] = balanced_start(n, q, j);

  std::vector<Message> outgoing;
  const Gnum first = g.first_global();
  const Gnum last = first + g.local_count();
  for (int j = 0; j < q; ++j) {
    const Gnum from = std::max(first, proc_vrt[j]);
    const Gnum to = std::min(last, proc_vrt[j + 1]);
    if (from >= to) continue;
    LocalAdjacency part;
    for (Gnum global = from; global < to; ++global) {
      const Gnum v = global - first;
      part.vwgt.push_back(g.vert_wgt[v]);
      part.labels.push_back(g.vert_label[v]);
      for (Gnum e = g.vert_loc[v]; e < g.vend_loc[v]; ++e) {
        part.adj.push_back(g.edge_loc[e]);
        part.wgt.push_back(g.edge_wgt[e]);
      }
      part.xadj.push_back(static_cast<Gnum>(part.adj.size()));
    }
    Packer packer;
    part.pack(packer);
    outgoing.push_back({comm.rank(), lo + j, tag_fold, packer.take()});
  }
  auto incoming = comm.exchange(std::move(outgoing));
  if (comm.rank() < lo || comm.rank() >= hi) {
    check_invariant(incoming.empty(), "fold_to: non-receiver got data");
    return std::nullopt;
  }
  LocalAdjacency local;
  for (const auto& message : incoming) {
    Unpacker unpacker(message.payload);
    local.append(LocalAdjacency::unpack(unpacker));
  }
  return make_fragment(comm.rank() - lo, q, std::move(proc_vrt), g.base, std::move(local), g.global_arc_count);
}

enum class FoldSide { first, second };

struct FoldResult {
  Comm group;                     // the half-group this rank belongs to
  std::optional<DistGraph> graph; // empty when this rank's half received nothing
};

/// Collective. Folds onto the first ceil(p/2) or the last floor(p/2) ranks;
/// with `duplicate`, both halves receive complete copies.
inline FoldResult fold(Comm& comm, const DistGraph& g, FoldSide side, bool duplicate) {
  if (comm.size() < 2) throw InvariantError("fold: group of size 1 cannot be folded");
  const int half = Comm::first_half_size(comm.size());
  std::optional<DistGraph> first, second;
  if (duplicate || side == FoldSide::first) first = fold_to(comm, g, 0, half);
  if (duplicate || side == FoldSide::second) second = fold_to(comm, g, half, comm.size());
  const bool in_first = comm.in_first_half();
  Comm sub = comm.split();
  return {std::move(sub), in_first ? std::move(first) : std::move(second)};
}

struct CentralGraph {
  Graph graph;
  std::vector<Gnum> labels;
};

/// Collective. Every rank receives the whole graph, numbered by global index.
inline CentralGraph centralize(Comm& comm, const DistGraph& g) {
  Packer packer;
  local_adjacency(g).pack(packer);
  auto gathered = comm.all_gather(packer.take());
  LocalAdjacency all;
  for (const auto& bytes : gathered) {
    Unpacker unpacker(bytes);
    all.append(LocalAdjacency::unpack(unpacker));
  }
  CentralGraph out;
  out.graph.xadj = std::move(all.xadj);
  out.graph.adjncy = std::move(all.adj);
  out.graph.ewgt = std::move(all.wgt);
  out.graph.vwgt = std::move(all.vwgt);
  out.labels = std::move(all.labels);
  return out;
}

/// A single-rank fragment viewed as a centralized graph.
inline CentralGraph to_central(const DistGraph& g) {
  check_invariant(g.procs == 1, "to_central: fragment is not the whole graph");
  auto local = local_adjacency(g);
  CentralGraph out;
  out.graph.xadj = std::move(local.xadj);
  out.graph.adjncy = std::move(local.adj);
  out.graph.ewgt = std::move(local.wgt);
  out.graph.vwgt = std::move(local.vwgt);
  out.labels = std::move(local.labels);
  return out;
}

/// Structural self-check of one fragment; empty string when consistent.
inline std::string check_fragment(const DistGraph& g) {
  if (static_cast<int>(g.proc_vrt.size()) != g.procs + 1) return "range array size mismatch";
  if (g.proc_vrt[g.rank + 1] - g.proc_vrt[g.rank] != g.local_count()) return "local count mismatch";
  if (g.vert_loc.size() != g.vert_wgt.size() || g.vend_loc.size() != g.vert_wgt.size()) return "index array size";
  for (Gnum v = 0; v < g.local_count(); ++v) {
    if (g.vert_loc[v] > g.vend_loc[v]) return "vert_loc > vend_loc";
    if (g.vert_wgt[v] < 1) return "vertex weight below 1";
  }
  for (std::size_t e = 0; e < g.edge_loc.size(); ++e) {
    if (g.edge_loc[e] < 0 || g.edge_loc[e] >= g.global_vertex_count) return "global neighbor out of range";
    if (g.global_of(g.edge_gst[e]) != g.edge_loc[e]) return "edge_gst disagrees with edge_loc";
  }
  for (Gnum i = 1; i < g.ghost_count(); ++i) {
    const auto a = std::make_pair(g.owner_of_global(g.ghost_global[i - 1]), g.ghost_global[i - 1]);
    const auto b = std::make_pair(g.owner_of_global(g.ghost_global[i]), g.ghost_global[i]);
    if (!(a < b)) return "ghosts not sorted by (owner, global)";
  }
  for (Gnum u : g.ghost_global) {
    if (g.owner_of_global(u) == g.rank) return "ghost owned locally";
  }
  return {};
}

}  // namespace ndorder

#endif  // NDORDER_DIST_GRAPH_HPP_
