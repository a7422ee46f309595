// Command-line front end: order, eval, check, gen.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ndorder/ndorder.hpp"

namespace {

using namespace ndorder;

constexpr int kExitInput = 1;
constexpr int kExitInvariant = 2;

std::string metrics_line(const ElimStats& stats, const Graph& g) {
  std::ostringstream out;
  out << "NNZ=" << stats.nnz << " OPC=" << stats.opc << " FILL=" << std::fixed << std::setprecision(6)
      << fill_ratio(stats, g);
  return out.str();
}

void report(const ElimStats& stats, const Graph& g) {
  std::cout << "vertices " << g.vertex_count() << ", edges " << g.edge_count() << ", factor nonzeros "
            << stats.nnz << ", operations " << stats.opc << '\n';
  std::cout << metrics_line(stats, g) << '\n';
}

void write_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".mtx") == 0) {
    write_matrix_market(out, g);
  } else {
    write_chaco(out, g);
  }
}

Graph generate(const std::string& kind, const std::vector<std::int64_t>& args) {
  auto need = [&](std::size_t count) {
    if (args.size() != count) {
      throw InputError("gen " + kind + " expects " + std::to_string(count) + " integer argument(s)");
    }
  };
  if (kind == "grid2d") return need(1), gen::grid2d(args[0]);
  if (kind == "grid3d") return need(1), gen::grid3d(args[0]);
  if (kind == "path") return need(1), gen::path(args[0]);
  if (kind == "star") return need(1), gen::star(args[0]);
  if (kind == "complete") return need(1), gen::complete(args[0]);
  if (kind == "edgeless") return need(1), gen::edgeless(args[0]);
  if (kind == "random") return need(3), gen::random(args[0], args[1], static_cast<std::uint64_t>(args[2]));
  throw InputError("unknown generator '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel nested dissection ordering on simulated processes"};
  app.require_subcommand(1);

  std::string input, output, perm_path, kind, schedule_name = "parallel";
  int procs = 1;
  std::uint64_t seed = 0;
  bool metrics = false;
  Strategy s;
  std::vector<std::int64_t> gen_args;

  auto* order = app.add_subcommand("order", "Compute a fill-reducing ordering");
  order->add_option("input", input, "Graph file (Chaco or Matrix Market)")->required();
  order->add_option("-o,--output", output, "Permutation file")->required();
  order->add_option("--procs", procs, "Number of simulated processes")->check(CLI::PositiveNumber);
  order->add_option("--seed", seed, "Random seed");
  order->add_flag("--metrics", metrics, "Print factorization metrics of the result");
  order->add_option("--schedule", schedule_name, "Process scheduling")
      ->check(CLI::IsMember({"parallel", "sequential"}));
  order->add_option("--nd-cutoff", s.nd_cutoff, "Order subgraphs this small by minimum degree");
  order->add_option("--fold-min", s.fold_min, "Fold when vertices per process drop below this");
  order->add_option("--coarsest-size", s.coarsest_size, "Stop coarsening at this many vertices");
  order->add_option("--match-passes", s.match_passes, "Maximum matching passes per level");
  order->add_option("--ratio-max", s.ratio_max, "Stop coarsening above this coarse/fine ratio");
  order->add_option("--band-width", s.band_width, "Band width for refinement, 0 refines whole graphs");
  order->add_option("--balance-tol", s.balance_tol, "Allowed part imbalance");
  order->add_option("--fm-passes", s.fm_pass_max, "Maximum refinement passes");
  order->add_option("--tries", s.tries, "Initial separator attempts");
  order->add_option("--separator-tries", s.separator_tries, "Multilevel separator attempts per dissection step");

  auto* eval = app.add_subcommand("eval", "Evaluate an ordering by symbolic factorization");
  eval->add_option("input", input, "Graph file")->required();
  eval->add_option("--perm", perm_path, "Permutation file")->required();

  auto* check = app.add_subcommand("check", "Validate a graph file");
  check->add_option("input", input, "Graph file")->required();

  auto* generate_cmd = app.add_subcommand("gen", "Write a synthetic graph");
  generate_cmd->add_option("kind", kind, "grid2d k | grid3d k | path n | star n | complete n | edgeless n | random n m seed")
      ->required();
  generate_cmd->add_option("args", gen_args, "Generator parameters")->required();
  generate_cmd->add_option("-o,--output", output, "Output graph file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*order) {
      const Graph g = read_graph_file(input);
      const auto schedule = schedule_name == "sequential" ? Schedule::sequential : Schedule::parallel;
      const InvPerm perm = order_graph(g, procs, seed, s, schedule);
      check_invariant(is_bijection(perm), "ordering is not a bijection");
      std::ofstream out(output, std::ios::binary);
      if (!out) throw InputError("cannot write '" + output + "'");
      write_perm(out, perm, {"seed=" + std::to_string(seed) + " procs=" + std::to_string(procs), s.describe()});
      if (metrics) report(symbolic_factorize(g, perm), g);
    } else if (*eval) {
      const Graph g = read_graph_file(input);
      std::ifstream in(perm_path);
      if (!in) throw InputError("cannot open '" + perm_path + "'");
      report(symbolic_factorize(g, read_perm(in)), g);
    } else if (*check) {
      const Graph g = read_graph_file(input);
      std::cout << "ok: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
    } else if (*generate_cmd) {
      write_graph(generate(kind, gen_args), output);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
