#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "ndorder/ndorder.hpp"
#include "oracles.hpp"

using namespace ndorder;

namespace {

// Gathers per-rank matchings into one global mate array.
std::vector<Gnum> global_mates(const std::vector<DistGraph>& parts, const std::vector<Matching>& matchings) {
  std::vector<Gnum> mate;
  for (std::size_t r = 0; r < parts.size(); ++r) {
    mate.insert(mate.end(), matchings[r].mate.begin(), matchings[r].mate.end());
  }
  return mate;
}

std::vector<Matching> run_match(const std::vector<DistGraph>& parts, std::uint64_t seed, const Strategy& s) {
  return run_group(static_cast<int>(parts.size()), seed, [&](Comm& c) { return match(c, parts[c.rank()], s); });
}

Graph weighted_triangle() {
  Graph g = Graph::from_lists({{1, 2}, {0, 2}, {0, 1}});
  // a-b weight 5, the other edges weight 1.
  g.ewgt = {5, 1, 5, 1, 1, 1};
  return g;
}

}  // namespace

TEST(Coarsen, SingleEdgeMatched) {
  const auto parts = distribute(gen::path(2), 1);
  const auto m = run_match(parts, 0, Strategy{});
  EXPECT_EQ(m[0].mate, (std::vector<Gnum>{1, 0}));
}

TEST(Coarsen, HeavyEdgeWins) {
  Strategy s;
  s.match_shuffle = false;  // vertex a is dequeued first
  const auto parts = distribute(weighted_triangle(), 1);
  const auto m = run_match(parts, 0, s);
  EXPECT_EQ(m[0].mate, (std::vector<Gnum>{1, 0, -1}));

  Rng rng(0);
  const auto seq = match_sequential(weighted_triangle(), rng, false);
  EXPECT_EQ(seq, (std::vector<Gnum>{1, 0, -1}));
}

TEST(Coarsen, CrossRankPathMatchingValidForManySeeds) {
  const Graph g = gen::path(4);
  const auto parts = distribute(g, 2);
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    const auto m = run_match(parts, seed, Strategy{});
    const auto mate = global_mates(parts, m);
    EXPECT_TRUE(oracle::is_matching(g, mate)) << "seed " << seed;
    EXPECT_GE(std::count_if(mate.begin(), mate.end(), [](Gnum u) { return u >= 0; }), 2);
    for (const auto& rank : m) EXPECT_LE(rank.passes, Strategy{}.match_passes);
  }
}

TEST(Coarsen, MatchingValidOnRandomGraphs) {
  int seed = 0;
  for (const auto& g : oracle::random_family(100, 200, 71)) {
    const int p = 1 + seed % 5;
    const auto parts = distribute(g, p);
    const auto m = run_match(parts, static_cast<std::uint64_t>(seed++), Strategy{});
    EXPECT_TRUE(oracle::is_matching(g, global_mates(parts, m)));
    Rng rng(seed);
    EXPECT_TRUE(oracle::is_matching(g, match_sequential(g, rng)));
  }
}

TEST(Coarsen, MatchingIsMaximalOnOneRank) {
  // With a single rank no request is ever refused, so no edge keeps both ends free.
  for (const auto& g : oracle::random_family(30, 80, 3)) {
    const auto m = run_match(distribute(g, 1), 4, Strategy{});
    for (Gnum v = 0; v < g.vertex_count(); ++v) {
      if (m[0].mate[v] >= 0) continue;
      for (Gnum u : g.neighbors(v)) EXPECT_GE(m[0].mate[u], 0);
    }
  }
}

TEST(Coarsen, PathCollapse) {
  const Graph g = gen::path(4);
  const auto level = coarse_build_sequential(g, {1, 0, 3, 2});
  EXPECT_EQ(level.coarse.vertex_count(), 2);
  EXPECT_EQ(level.coarse.vwgt, (std::vector<Gnum>{2, 2}));
  EXPECT_EQ(oracle::edge_multiset(level.coarse), (std::multiset<std::tuple<Gnum, Gnum, Gnum>>{{0, 1, 1}}));

  const auto parts = distribute(g, 2);
  auto coarse = run_group(2, 0, [&](Comm& c) {
    Matching m;
    m.mate = c.rank() == 0 ? std::vector<Gnum>{1, 0} : std::vector<Gnum>{3, 2};
    return coarse_build(c, parts[c.rank()], m).coarse;
  });
  EXPECT_EQ(coarse[0].global_vertex_count, 2);
  EXPECT_EQ(oracle::edge_multiset(coarse), (std::multiset<std::tuple<Gnum, Gnum, Gnum>>{{0, 1, 1}}));
}

TEST(Coarsen, EmptyMatchingIsIdentity) {
  for (const auto& g : oracle::random_family(10, 60, 9)) {
    const auto level = coarse_build_sequential(g, std::vector<Gnum>(static_cast<std::size_t>(g.vertex_count()), -1));
    EXPECT_EQ(oracle::edge_multiset(level.coarse), oracle::edge_multiset(g));
  }
}

TEST(Coarsen, TriangleMergesParallelEdges) {
  const Graph g = Graph::from_lists({{1, 2}, {0, 2}, {0, 1}});
  const auto level = coarse_build_sequential(g, {1, 0, -1});
  EXPECT_EQ(level.coarse.vwgt, (std::vector<Gnum>{2, 1}));
  EXPECT_EQ(oracle::edge_multiset(level.coarse), (std::multiset<std::tuple<Gnum, Gnum, Gnum>>{{0, 1, 2}}));
}

TEST(Coarsen, DistributedBuildConservesWeightAndEdges) {
  int seed = 0;
  for (const auto& g : oracle::random_family(40, 200, 13)) {
    const int p = 1 + seed % 4;
    const auto parts = distribute(g, p);
    auto result = run_group(p, static_cast<std::uint64_t>(seed++), [&](Comm& c) {
      auto m = match(c, parts[c.rank()], Strategy{});
      return coarse_build(c, parts[c.rank()], m);
    });
    Gnum weight = 0;
    std::vector<DistGraph> coarse;
    for (auto& r : result) {
      EXPECT_EQ(check_fragment(r.coarse), "");
      weight += r.coarse.local_weight();
      coarse.push_back(r.coarse);
    }
    EXPECT_EQ(weight, g.vertex_count());
    // Oracle: collapse the global fine edge list through the gathered map.
    std::vector<Gnum> map;
    for (std::size_t r = 0; r < result.size(); ++r) {
      map.insert(map.end(), result[r].fine_to_coarse.begin(),
                 result[r].fine_to_coarse.begin() + parts[r].local_count());
    }
    std::map<std::pair<Gnum, Gnum>, Gnum> merged;
    for (Gnum v = 0; v < g.vertex_count(); ++v) {
      for (Gnum u : g.neighbors(v)) {
        if (v < u && map[v] != map[u]) merged[{std::min(map[v], map[u]), std::max(map[v], map[u])}] += 1;
      }
    }
    std::multiset<std::tuple<Gnum, Gnum, Gnum>> expected;
    for (auto& [edge, w] : merged) expected.emplace(edge.first, edge.second, w);
    EXPECT_EQ(oracle::edge_multiset(coarse), expected);
  }
}

TEST(Coarsen, SequentialLevelsShrinkToThreshold) {
  Rng rng(1);
  Strategy s;
  s.coarsest_size = 16;
  const auto levels = coarsen_sequential(gen::path(64), rng, s);
  ASSERT_FALSE(levels.empty());
  Gnum previous = 64;
  for (const auto& level : levels) {
    EXPECT_LT(level.coarse.vertex_count(), previous);
    EXPECT_EQ(level.coarse.total_weight(), 64);
    previous = level.coarse.vertex_count();
  }
  EXPECT_LE(levels.back().coarse.vertex_count(), 16);
}

TEST(Coarsen, ThresholdAtSizeMeansNoLevels) {
  Rng rng(0);
  Strategy s;
  s.coarsest_size = 64;
  EXPECT_TRUE(coarsen_sequential(gen::path(64), rng, s).empty());
}

TEST(Coarsen, FoldDupFiresBelowFoldMin) {
  const auto parts = distribute(gen::path(64), 2);
  auto out = run_group(2, 0, [&](Comm& c) {
    auto h = coarsen_to_bottom(c, parts[c.rank()], Strategy{});
    return std::make_pair(h.actions(), h.bottom.vertex_count());
  });
  for (const auto& [actions, bottom] : out) {
    ASSERT_FALSE(actions.empty());
    EXPECT_EQ(actions[0], LevelAction::fold_dup);
    EXPECT_EQ(bottom, 64);
  }
}

TEST(Coarsen, HierarchyWeightConservationAndFootprint) {
  for (const Graph& g : {gen::grid2d(24), gen::grid3d(8), gen::random(600, 2400, 3)}) {
    for (int p : {1, 2, 3, 4, 8}) {
      const auto parts = distribute(g, p);
      auto out = run_group(p, 7, [&](Comm& c) {
        auto h = coarsen_to_bottom(c, parts[c.rank()], Strategy{});
        bool conserved = true;
        for (std::size_t k = 0; k < h.graphs.size(); ++k) {
          conserved &= h.comms[k]->all_reduce_sum(h.graphs[k].local_weight()) == g.vertex_count();
        }
        for (const auto& level : h.seq_levels) conserved &= level.coarse.total_weight() == g.vertex_count();
        conserved &= h.bottom.total_weight() == g.vertex_count();
        return std::make_pair(conserved, h.stored_vertices());
      });
      for (const auto& [conserved, stored] : out) {
        EXPECT_TRUE(conserved);
        EXPECT_LE(stored, 4 * g.vertex_count()) << "p=" << p;
      }
    }
  }
}
