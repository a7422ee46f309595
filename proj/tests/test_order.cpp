#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "ndorder/ndorder.hpp"
#include "oracles.hpp"

using namespace ndorder;

namespace {

InvPerm natural(Gnum n) {
  InvPerm perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Gnum{0});
  return perm;
}

// Relabels a graph so that old vertex v becomes new_of_old[v].
Graph relabel(const Graph& g, const std::vector<Gnum>& new_of_old) {
  std::vector<std::pair<Gnum, Gnum>> edges;
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    for (Gnum u : g.neighbors(v)) {
      if (v < u) edges.emplace_back(new_of_old[v], new_of_old[u]);
    }
  }
  return Graph::from_edges(g.vertex_count(), edges);
}

}  // namespace

TEST(Assemble, SingleLeafVerbatim) {
  OrderTree tree;
  tree.leaves.push_back(make_leaf(NodeKind::sequential, "", 0, {2, 0, 1}));
  EXPECT_EQ(assemble(tree, 3), (InvPerm{2, 0, 1}));
}

TEST(Assemble, LeavesConcatenateByStart) {
  const auto tree = OrderTree::merge({{make_leaf(NodeKind::separator, "s", 5, {5, 6})},
                                      {make_leaf(NodeKind::sequential, "1", 3, {3, 4}),
                                       make_leaf(NodeKind::sequential, "0", 0, {0, 1, 2}),
                                       make_internal("", 0, 7, 3, 2)}});
  EXPECT_EQ(check_tiling(tree, 7), "");
  EXPECT_EQ(check_separator_last(tree), "");
  EXPECT_EQ(assemble(tree, 7), (InvPerm{0, 1, 2, 3, 4, 5, 6}));
}

TEST(Assemble, GapsAndOverlapsAreInvariantViolations) {
  OrderTree gap;
  gap.leaves = {make_leaf(NodeKind::sequential, "0", 0, {0}), make_leaf(NodeKind::sequential, "1", 2, {1})};
  EXPECT_NE(check_tiling(gap, 3), "");
  EXPECT_THROW(assemble(gap, 3), InvariantError);

  OrderTree overlap;
  overlap.leaves = {make_leaf(NodeKind::sequential, "0", 0, {0, 1}), make_leaf(NodeKind::sequential, "1", 1, {2})};
  EXPECT_THROW(assemble(overlap, 3), InvariantError);
}

TEST(Assemble, SeparatorBelowPartsIsRejected) {
  auto tree = OrderTree::merge({{make_internal("", 0, 3, 1, 1), make_leaf(NodeKind::separator, "s", 0, {1}),
                                 make_leaf(NodeKind::sequential, "0", 1, {0}),
                                 make_leaf(NodeKind::sequential, "1", 2, {2})}});
  EXPECT_EQ(check_tiling(tree, 3), "");
  EXPECT_NE(check_separator_last(tree), "");
}

TEST(Invert, Examples) {
  EXPECT_EQ(invert({2, 0, 1}), (std::vector<Gnum>{1, 2, 0}));
  EXPECT_EQ(invert(invert({3, 1, 0, 2})), (std::vector<Gnum>{3, 1, 0, 2}));
  EXPECT_THROW(invert({0, 0, 1}), InputError);
  EXPECT_THROW(invert({0, 3}), InputError);
}

TEST(MinDegree, SingleVertex) { EXPECT_EQ(min_degree_order(gen::path(1)), (std::vector<Gnum>{0})); }

TEST(MinDegree, StarCenterLast) {
  // Center at the highest index: every tie goes to a leaf.
  std::vector<Gnum> new_of_old{4, 0, 1, 2, 3};
  const auto order = min_degree_order(relabel(gen::star(4), new_of_old));
  EXPECT_EQ(order.back(), 4);
  // Center 0: once one leaf remains it ties with the center, which wins on index.
  const auto order0 = min_degree_order(gen::star(4));
  const auto pos = std::find(order0.begin(), order0.end(), 0) - order0.begin();
  EXPECT_GE(pos, 3);
  EXPECT_EQ(symbolic_factorize(gen::star(4), order0).nnz, 9);
}

TEST(MinDegree, PathHasNoFill) {
  const Graph g = gen::path(4);
  const auto order = min_degree_order(g);
  EXPECT_TRUE(is_bijection(order));
  EXPECT_EQ(symbolic_factorize(g, order).nnz, 7);
}

TEST(MinDegree, NoFillOnChordalFamilies) {
  // Trees and complete graphs admit perfect elimination orderings; exact
  // minimum degree finds one.
  for (const Graph& g : {gen::path(30), gen::star(12), gen::complete(9), gen::edgeless(5)}) {
    const auto order = min_degree_order(g);
    EXPECT_EQ(symbolic_factorize(g, order).nnz, g.edge_count() + g.vertex_count());
  }
}

TEST(NestedDissection, EdgelessGraph) {
  const Graph g = gen::edgeless(10);
  for (int p : {1, 3}) {
    const auto perm = order_graph(g, p, 0, Strategy{});
    EXPECT_TRUE(is_bijection(perm));
    EXPECT_EQ(symbolic_factorize(g, perm).opc, 10);
  }
}

TEST(NestedDissection, ThreeByThreeGridSeparatorLast) {
  const Graph g = gen::grid2d(3);
  Strategy s;
  s.nd_cutoff = 4;
  const auto tree = order_tree(g, 1, 0, s);
  EXPECT_EQ(check_tiling(tree, 9), "");
  EXPECT_EQ(check_separator_last(tree), "");
  const auto perm = assemble(tree, 9);
  // The top separator occupies {6, 7, 8} and separates the rest.
  std::vector<PartLabel> labels(9, kPart0);
  for (Gnum k = 6; k < 9; ++k) labels[perm[k]] = kSeparator;
  for (Gnum k = 3; k < 6; ++k) labels[perm[k]] = kPart1;
  const auto p = Partition::from_labels(g, labels);
  EXPECT_TRUE(is_separator(g, p.part));
  EXPECT_EQ(p.w0(), 3);
  EXPECT_EQ(p.w1(), 3);
  ASSERT_EQ(tree.internals.size(), 1u);
  EXPECT_EQ(tree.internals[0].part0_size, 3);
  EXPECT_EQ(tree.internals[0].part1_size, 3);
}

TEST(NestedDissection, PathOfSevenOnTwoProcesses) {
  const Graph g = gen::path(7);
  const auto natural_opc = symbolic_factorize(g, natural(7)).opc;

  // Forced dissection: the middle vertex is ordered last.
  Strategy s;
  s.nd_cutoff = 3;
  s.fold_min = 1;
  s.coarsest_size = 2;
  const auto tree = order_tree(g, 2, 1, s);
  EXPECT_EQ(check_separator_last(tree), "");
  const auto perm = assemble(tree, 7);
  ASSERT_TRUE(is_bijection(perm));
  EXPECT_EQ(perm[6], 3);

  // Defaults leave a graph this small to minimum degree, which has no fill on a path.
  const auto small = order_graph(g, 2, 1, Strategy{});
  ASSERT_TRUE(is_bijection(small));
  EXPECT_LE(symbolic_factorize(g, small).opc, natural_opc);
}

TEST(NestedDissection, DeterministicAcrossSchedules) {
  const Graph g = gen::grid2d(20);
  for (int p : {1, 3, 4}) {
    const auto a = order_graph(g, p, 11, Strategy{});
    EXPECT_EQ(order_graph(g, p, 11, Strategy{}), a);
    EXPECT_EQ(order_graph(g, p, 11, Strategy{}, Schedule::sequential), a);
  }
}

TEST(NestedDissection, GridsBeatNaturalOrder) {
  for (Gnum k : {15, 31}) {
    const Graph g = gen::grid2d(k);
    const auto nd = symbolic_factorize(g, order_graph(g, 1, 0, Strategy{})).opc;
    EXPECT_LT(nd, symbolic_factorize(g, natural(g.vertex_count())).opc) << "k=" << k;
  }
}

TEST(NestedDissection, TreeInvariantsOnRandomGraphs) {
  int round = 0;
  for (const auto& g : oracle::random_family(100, 200, 61)) {
    Strategy s;
    s.nd_cutoff = 1 + round % 40;
    s.fold_min = 1 + round % 30;
    const int p = 1 + round % 6;
    const auto tree = order_tree(g, p, static_cast<std::uint64_t>(round++), s);
    EXPECT_EQ(check_tiling(tree, g.vertex_count()), "");
    EXPECT_EQ(check_separator_last(tree), "");
    EXPECT_TRUE(is_bijection(assemble(tree, g.vertex_count())));
  }
}

TEST(NestedDissection, GeneratorFamily) {
  for (const auto& g : oracle::generator_family()) {
    for (int p : {1, 2, 5}) {
      Strategy s;
      s.nd_cutoff = 3;
      const auto tree = order_tree(g, p, 2, s);
      EXPECT_EQ(check_tiling(tree, g.vertex_count()), "");
      EXPECT_EQ(check_separator_last(tree), "");
    }
  }
}
