// Orders a 2D grid on a few simulated processes and compares with the
// natural row-major order.

#include <iostream>
#include <numeric>

#include "ndorder/ndorder.hpp"

int main() {
  using namespace ndorder;
  const Graph g = gen::grid2d(20);
  const InvPerm nd = order_graph(g, 4, 42, Strategy{});
  InvPerm natural(static_cast<std::size_t>(g.vertex_count()));
  std::iota(natural.begin(), natural.end(), Gnum{0});

  const auto nd_stats = symbolic_factorize(g, nd);
  const auto natural_stats = symbolic_factorize(g, natural);
  std::cout << "nested dissection: NNZ=" << nd_stats.nnz << " OPC=" << nd_stats.opc << '\n';
  std::cout << "row-major:         NNZ=" << natural_stats.nnz << " OPC=" << natural_stats.opc << '\n';
  return 0;
}
