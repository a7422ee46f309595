#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "ndorder/ndorder.hpp"
#include "oracles.hpp"

using namespace ndorder;

namespace {

template <typename F>
auto on_fragments(const std::vector<DistGraph>& parts, F&& f) {
  return run_group(static_cast<int>(parts.size()), 3, [&](Comm& c) { return f(c, parts[c.rank()]); });
}

// Three processes, base 1: process 1 owns globals 11..16; its local vertex 2
// is global 12 with neighbors 19, 2 and 11, in that order.
std::vector<DistGraph> three_process_example() {
  const Gnum n = 23;
  std::vector<std::vector<Gnum>> adj(static_cast<std::size_t>(n));
  auto link = [&](Gnum a, Gnum b) {  // based indices
    adj[a - 1].push_back(b);
    adj[b - 1].push_back(a);
  };
  link(11, 12);
  adj[12 - 1].push_back(19);
  adj[19 - 1].push_back(12);
  adj[12 - 1].push_back(2);
  adj[2 - 1].push_back(12);
  link(1, 2);
  link(17, 18);
  std::swap(adj[12 - 1][0], adj[12 - 1][1]);  // 12: {11, 19, 2} -> {19, 11, 2}
  std::swap(adj[12 - 1][1], adj[12 - 1][2]);  // -> {19, 2, 11}
  std::vector<int> owner(static_cast<std::size_t>(n));
  for (Gnum v = 0; v < n; ++v) owner[v] = v < 10 ? 0 : (v < 16 ? 1 : 2);
  return build(adj, owner, {}, 1, 3);
}

}  // namespace

TEST(DistGraph, ThreeProcessExample) {
  const auto parts = three_process_example();
  const DistGraph& g = parts[1];
  EXPECT_EQ(g.external_global_of_local(2), 12);
  EXPECT_EQ(g.external_vert_loc(2), 2);
  EXPECT_EQ(g.external_vend_loc(2), 5);
  EXPECT_EQ(g.external_neighbors(2), (std::vector<Gnum>{19, 2, 11}));
  EXPECT_EQ(owner_of(g, 12), 1);
  // Ghosts by ascending owner then global: 2 (rank 0) before 19 (rank 2).
  EXPECT_EQ(g.ghost_global, (std::vector<Gnum>{1, 18}));
  for (const auto& part : parts) EXPECT_EQ(check_fragment(part), "");
}

TEST(DistGraph, OwnerOfBoundariesAndRange) {
  const Graph g = gen::path(30);
  const auto parts = distribute(g, 3);
  EXPECT_EQ(owner_of(parts[0], 10), 1);  // range start
  EXPECT_EQ(owner_of(parts[0], 9), 0);
  EXPECT_EQ(owner_of(parts[0], 25), 2);
  EXPECT_THROW(owner_of(parts[0], 30), InvariantError);
  EXPECT_THROW(owner_of(parts[0], -1), InvariantError);

  std::vector<std::vector<Gnum>> adj(30);
  std::vector<int> owner(30);
  for (Gnum v = 0; v < 30; ++v) owner[v] = static_cast<int>(v / 10);
  const auto based = build(adj, owner, {}, 1, 3);
  EXPECT_EQ(owner_of(based[0], 1 + 25), 2);
  EXPECT_EQ(owner_of(based[0], 1 + 10), 1);
}

TEST(DistGraph, PathSplitGhosts) {
  std::vector<std::vector<Gnum>> adj{{2}, {1, 3}, {2}};
  const auto parts = build(adj, {0, 0, 1}, {}, 1, 2);
  ASSERT_EQ(parts[0].ghost_count(), 1);
  ASSERT_EQ(parts[1].ghost_count(), 1);
  EXPECT_EQ(parts[0].ghost_global[0], 2);  // vertex 3, 0-based
  EXPECT_EQ(parts[1].ghost_global[0], 1);  // vertex 2, 0-based
}

TEST(DistGraph, SingleRankHasNoGhosts) {
  for (const auto& g : oracle::generator_family()) {
    EXPECT_EQ(distribute(g, 1)[0].ghost_count(), 0);
  }
}

TEST(DistGraph, BuildRejectsBadInput) {
  EXPECT_THROW(build({{2}, {}}, {0, 0}, {}, 1, 1), InputError);          // asymmetric
  EXPECT_THROW(build({{5}, {}}, {0, 0}, {}, 1, 1), InputError);          // outside all ranges
  EXPECT_THROW(build({{}, {}}, {0}, {}, 1, 1), InputError);              // owners incomplete
  EXPECT_THROW(build({{}, {}, {}}, {1, 0, 1}, {}, 1, 2), InputError);    // non-contiguous
  EXPECT_THROW(build({{1}}, {0}, {}, 1, 1), InputError);                 // self-loop
}

TEST(DistGraph, FragmentsAreConsistent) {
  for (const auto& g : oracle::random_family(40, 120, 17)) {
    for (int p : {1, 2, 3, 5}) {
      const auto parts = distribute(g, p);
      EXPECT_EQ(oracle::edge_multiset(parts), oracle::edge_multiset(g));
      for (const auto& part : parts) {
        EXPECT_EQ(check_fragment(part), "");
        // Ghost adjacency is never stored: index arrays cover local vertices only.
        EXPECT_EQ(static_cast<Gnum>(part.vert_loc.size()), part.local_count());
        EXPECT_EQ(part.global_arc_count, g.arc_count());
      }
    }
  }
}

TEST(DistGraph, HaloExchangePath) {
  std::vector<std::vector<Gnum>> adj{{2}, {1, 3}, {2}};
  const auto parts = build(adj, {0, 0, 1}, {}, 1, 2);
  auto ghosts = on_fragments(parts, [](Comm& c, const DistGraph& g) {
    VertexData<Gnum> data(static_cast<std::size_t>(g.slot_count()), -1);
    if (c.rank() == 0) {
      data[0] = 10;
      data[1] = 20;
    } else {
      data[0] = 30;
    }
    halo_exchange(c, g, data);
    return data.back();
  });
  EXPECT_EQ(ghosts, (std::vector<Gnum>{30, 20}));
}

TEST(DistGraph, HaloExchangeEqualsOwnerValues) {
  for (const auto& g : oracle::random_family(30, 150, 23)) {
    for (int p : {1, 2, 4}) {
      const auto parts = distribute(g, p);
      auto ok = on_fragments(parts, [](Comm& c, const DistGraph& part) {
        VertexData<Gnum> data(static_cast<std::size_t>(part.slot_count()), -7);
        for (Gnum v = 0; v < part.local_count(); ++v) data[v] = 1000 + part.global_of(v) * 3;
        const auto locals = std::vector<Gnum>(data.begin(), data.begin() + part.local_count());
        halo_exchange(c, part, data);
        bool good = std::equal(locals.begin(), locals.end(), data.begin());
        for (Gnum s = part.local_count(); s < part.slot_count(); ++s) good &= data[s] == 1000 + part.global_of(s) * 3;
        auto again = data;
        halo_exchange(c, part, again);
        return good && again == data;
      });
      for (bool b : ok) EXPECT_TRUE(b);
    }
  }
}

TEST(DistGraph, HaloExchangeRejectsWrongLength) {
  const auto parts = distribute(gen::path(4), 2);
  EXPECT_THROW(on_fragments(parts,
                            [](Comm& c, const DistGraph& g) {
                              VertexData<int> data(1);
                              halo_exchange(c, g, data);
                              return 0;
                            }),
               InvariantError);
}

TEST(DistGraph, InducedAllTrueIsIdentity) {
  for (const auto& g : oracle::random_family(20, 100, 5)) {
    const auto parts = distribute(g, 3);
    auto sub = on_fragments(parts, [](Comm& c, const DistGraph& part) {
      std::vector<char> flags(static_cast<std::size_t>(part.local_count()), 1);
      return induced_subgraph(c, part, flags).graph;
    });
    EXPECT_EQ(oracle::edge_multiset(sub), oracle::edge_multiset(g));
  }
}

TEST(DistGraph, InducedOneEndpointPerEdgeIsEdgeless) {
  const Graph g = gen::path(9);
  const auto parts = distribute(g, 3);
  auto sub = on_fragments(parts, [](Comm& c, const DistGraph& part) {
    std::vector<char> flags(static_cast<std::size_t>(part.local_count()));
    for (Gnum v = 0; v < part.local_count(); ++v) flags[v] = part.global_of(v) % 2 == 0;
    return induced_subgraph(c, part, flags).graph;
  });
  EXPECT_TRUE(oracle::edge_multiset(sub).empty());
  EXPECT_EQ(sub[0].global_vertex_count, 5);
}

TEST(DistGraph, InducedGridColumns) {
  const Graph g = gen::grid2d(3);
  for (int p : {1, 2, 3}) {
    const auto parts = distribute(g, p);
    auto result = on_fragments(parts, [](Comm& c, const DistGraph& part) {
      std::vector<char> flags(static_cast<std::size_t>(part.local_count()));
      for (Gnum v = 0; v < part.local_count(); ++v) flags[v] = part.global_of(v) % 3 != 2;
      return induced_subgraph(c, part, flags);
    });
    std::vector<DistGraph> sub;
    for (auto& r : result) sub.push_back(r.graph);
    // Kept 0,1,3,4,6,7 become 0..5: a 3x2 grid.
    std::multiset<std::tuple<Gnum, Gnum, Gnum>> expected{{0, 1, 1}, {2, 3, 1}, {4, 5, 1}, {0, 2, 1},
                                                          {2, 4, 1}, {1, 3, 1}, {3, 5, 1}};
    EXPECT_EQ(oracle::edge_multiset(sub), expected);
    for (const auto& part : sub) {
      EXPECT_EQ(check_fragment(part), "");
      for (Gnum v = 0; v < part.local_count(); ++v) EXPECT_NE(part.vert_label[v] % 3, 2);
    }
  }
}

TEST(DistGraph, FoldBalancesAndPreservesEdges) {
  const Graph g = gen::path(8);
  const auto parts = distribute(g, 4);
  auto sizes = on_fragments(parts, [](Comm& c, const DistGraph& part) {
    auto folded = fold(c, part, FoldSide::first, false);
    return folded.graph ? folded.graph->local_count() : Gnum{-1};
  });
  EXPECT_EQ(sizes, (std::vector<Gnum>{4, 4, -1, -1}));
}

TEST(DistGraph, FoldDuplicateOnTwoRanks) {
  const Graph g = gen::grid2d(4);
  const auto parts = distribute(g, 2);
  auto out = on_fragments(parts, [](Comm& c, const DistGraph& part) {
    auto folded = fold(c, part, FoldSide::first, true);
    return std::make_pair(folded.group.size(), *folded.graph);
  });
  for (const auto& [size, graph] : out) {
    EXPECT_EQ(size, 1);
    EXPECT_EQ(graph.local_count(), 16);
    EXPECT_EQ(oracle::edge_multiset(std::vector<DistGraph>{graph}), oracle::edge_multiset(g));
  }
}

TEST(DistGraph, FoldEdgeMultisetPreserved) {
  for (const auto& g : oracle::random_family(30, 200, 41)) {
    for (int p : {2, 3, 5, 8}) {
      const auto parts = distribute(g, p);
      for (FoldSide side : {FoldSide::first, FoldSide::second}) {
        auto out = on_fragments(parts, [&](Comm& c, const DistGraph& part) {
          auto folded = fold(c, part, side, false);
          return folded.graph;
        });
        std::vector<DistGraph> received;
        for (auto& maybe : out) {
          if (maybe) {
            EXPECT_EQ(check_fragment(*maybe), "");
            received.push_back(*maybe);
          }
        }
        EXPECT_EQ(received.size(), side == FoldSide::first ? (p + 1) / 2u : p / 2u);
        EXPECT_EQ(oracle::edge_multiset(received), oracle::edge_multiset(g));
        Gnum min = g.vertex_count(), max = 0;
        for (const auto& r : received) {
          min = std::min(min, r.local_count());
          max = std::max(max, r.local_count());
        }
        EXPECT_LE(max - min, 1);
      }
    }
  }
}

TEST(DistGraph, CentralizeRoundTrip) {
  for (const auto& g : oracle::random_family(20, 100, 8)) {
    const auto parts = distribute(g, 3);
    auto central = on_fragments(parts, [](Comm& c, const DistGraph& part) { return centralize(c, part); });
    for (const auto& cg : central) {
      EXPECT_EQ(oracle::edge_multiset(cg.graph), oracle::edge_multiset(g));
      std::vector<Gnum> identity(static_cast<std::size_t>(g.vertex_count()));
      std::iota(identity.begin(), identity.end(), Gnum{0});
      EXPECT_EQ(cg.labels, identity);
    }
  }
}
