#ifndef NDORDER_IO_HPP_
#define NDORDER_IO_HPP_

// Text formats: Chaco/METIS graphs (1-based on disk), Matrix Market
// coordinate matrices, and permutation files.

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ndorder/common.hpp"
#include "ndorder/graph.hpp"
#include "ndorder/order_tree.hpp"

namespace ndorder {

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

inline std::vector<Gnum> parse_integers(const std::string& line, const std::string& where) {
  std::istringstream in(line);
  std::vector<Gnum> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    Gnum value = 0;
    try {
      value = std::stoll(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw InputError(where + ": bad integer '" + token + "'");
    values.push_back(value);
  }
  return values;
}

}  // namespace detail

/// Chaco/METIS graph. Header `n m [fmt [ncon]]`; fmt digits select vertex
/// sizes (ignored), vertex weights and edge weights. Only the first of
/// several vertex weights is kept.
inline Graph read_chaco(std::istream& in) {
  std::string line;
  std::vector<Gnum> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    if (detail::blank(line)) continue;
    header = detail::parse_integers(line, "chaco header");
    break;
  }
  if (header.size() < 2 || header.size() > 4) throw InputError("chaco: missing or malformed header");
  const Gnum n = header[0];
  const Gnum m = header[1];
  if (n < 0 || m < 0) throw InputError("chaco: negative sizes in header");
  const Gnum fmt = header.size() > 2 ? header[2] : 0;
  if (fmt < 0 || fmt > 111 || fmt % 10 > 1 || fmt / 10 % 10 > 1) throw InputError("chaco: unsupported format flag");
  const bool has_sizes = fmt / 100 == 1;
  const bool has_vwgt = fmt / 10 % 10 == 1;
  const bool has_ewgt = fmt % 10 == 1;
  const Gnum ncon = header.size() > 3 ? header[3] : (has_vwgt ? 1 : 0);
  if (ncon < 0 || (ncon > 0 && !has_vwgt)) throw InputError("chaco: constraint count without vertex weights");

  Graph g;
  g.xadj.assign(1, 0);
  Gnum v = 0;
  while (v < n && std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    const std::string where = "chaco line for vertex " + std::to_string(v + 1);
    auto values = detail::parse_integers(line, where);
    std::size_t at = 0;
    if (has_sizes) ++at;
    Gnum weight = 1;
    if (has_vwgt) {
      if (values.size() < at + static_cast<std::size_t>(ncon)) throw InputError(where + ": missing vertex weight");
      weight = values[at];
      at += static_cast<std::size_t>(ncon);
    }
    if (weight < 1) throw InputError(where + ": vertex weight must be positive");
    const std::size_t stride = has_ewgt ? 2 : 1;
    if ((values.size() - std::min(at, values.size())) % stride != 0 || at > values.size()) {
      throw InputError(where + ": neighbor list malformed");
    }
    for (; at < values.size(); at += stride) {
      const Gnum u = values[at];
      if (u < 1 || u > n) throw InputError(where + ": neighbor " + std::to_string(u) + " out of range");
      const Gnum w = has_ewgt ? values[at + 1] : 1;
      if (w < 1) throw InputError(where + ": edge weight must be positive");
      g.adjncy.push_back(u - 1);
      g.ewgt.push_back(w);
    }
    g.vwgt.push_back(weight);
    g.xadj.push_back(static_cast<Gnum>(g.adjncy.size()));
    ++v;
  }
  if (v < n) throw InputError("chaco: expected " + std::to_string(n) + " vertex lines, got " + std::to_string(v));
  while (std::getline(in, line)) {
    if (!(line.empty() || line[0] == '%' || detail::blank(line))) throw InputError("chaco: trailing data after vertex lines");
  }
  if (auto problem = validate(g); !problem.empty()) throw InputError("chaco: " + problem);
  const Gnum arcs = g.arc_count();
  if (m != arcs / 2 && m != arcs) {
    throw InputError("chaco: header announces " + std::to_string(m) + " edges, found " + std::to_string(arcs / 2));
  }
  return g;
}

inline Graph read_chaco(const std::string& text) {
  std::istringstream in(text);
  return read_chaco(in);
}

/// Writes weights only when some differ from 1.
inline void write_chaco(std::ostream& out, const Graph& g) {
  const bool vwgt = std::any_of(g.vwgt.begin(), g.vwgt.end(), [](Gnum w) { return w != 1; });
  const bool ewgt = std::any_of(g.ewgt.begin(), g.ewgt.end(), [](Gnum w) { return w != 1; });
  out << g.vertex_count() << ' ' << g.edge_count();
  if (vwgt || ewgt) out << ' ' << (vwgt ? "1" : "0") << (ewgt ? "1" : "0");
  out << '\n';
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    bool first = true;
    auto sep = [&] {
      if (!first) out << ' ';
      first = false;
    };
    if (vwgt) {
      sep();
      out << g.vwgt[v];
    }
    for (Gnum e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      sep();
      out << g.adjncy[e] + 1;
      if (ewgt) out << ' ' << g.ewgt[e];
    }
    out << '\n';
  }
}

/// Coordinate Matrix Market. The pattern is symmetrized and the diagonal dropped.
inline Graph read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("matrix market: empty input");
  std::istringstream banner(detail::lowercase(line));
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") throw InputError("matrix market: missing banner");
  if (format != "coordinate") throw InputError("matrix market: only coordinate format is supported");
  int values_per_entry = 0;
  if (field == "real" || field == "integer") {
    values_per_entry = 1;
  } else if (field == "complex") {
    values_per_entry = 2;
  } else if (field != "pattern") {
    throw InputError("matrix market: unknown field '" + field + "'");
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric" && symmetry != "hermitian") {
    throw InputError("matrix market: unknown symmetry '" + symmetry + "'");
  }

  std::vector<Gnum> size;
  while (std::getline(in, line)) {
    if ((!line.empty() && line[0] == '%') || detail::blank(line)) continue;
    size = detail::parse_integers(line, "matrix market size line");
    break;
  }
  if (size.size() != 3) throw InputError("matrix market: malformed size line");
  if (size[0] != size[1]) throw InputError("matrix market: matrix is not square");
  const Gnum n = size[0];
  const Gnum entries = size[2];
  if (n < 0 || entries < 0) throw InputError("matrix market: negative sizes");

  std::vector<std::pair<Gnum, Gnum>> edges;
  Gnum seen = 0;
  while (seen < entries && std::getline(in, line)) {
    if ((!line.empty() && line[0] == '%') || detail::blank(line)) continue;
    std::istringstream entry(line);
    Gnum i = 0, j = 0;
    if (!(entry >> i >> j)) throw InputError("matrix market: malformed entry '" + line + "'");
    for (int k = 0; k < values_per_entry; ++k) {
      double value = 0;
      if (!(entry >> value)) throw InputError("matrix market: entry missing value '" + line + "'");
    }
    if (i < 1 || i > n || j < 1 || j > n) throw InputError("matrix market: entry out of range '" + line + "'");
    if (i != j) edges.emplace_back(i - 1, j - 1);
    ++seen;
  }
  if (seen < entries) throw InputError("matrix market: fewer entries than announced");
  return Graph::from_edges(n, edges);
}

inline Graph read_matrix_market(const std::string& text) {
  std::istringstream in(text);
  return read_matrix_market(in);
}

/// Symmetric pattern, lower triangle, no diagonal.
inline void write_matrix_market(std::ostream& out, const Graph& g) {
  out << "%%MatrixMarket matrix coordinate pattern symmetric\n";
  out << g.vertex_count() << ' ' << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (Gnum v = 0; v < g.vertex_count(); ++v) {
    for (Gnum u : g.neighbors(v)) {
      if (u < v) out << v + 1 << ' ' << u + 1 << '\n';
    }
  }
}

/// Picks the reader from the banner: Matrix Market files start with "%%MatrixMarket".
inline Graph read_graph(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (detail::lowercase(text.substr(0, 14)) == "%%matrixmarket") return read_matrix_market(text);
  return read_chaco(text);
}

inline Graph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_graph(in);
}

/// One original index per line, in elimination order; header lines become `#` comments.
inline void write_perm(std::ostream& out, const InvPerm& perm, const std::vector<std::string>& header = {}) {
  for (const auto& line : header) out << "# " << line << '\n';
  for (Gnum v : perm) out << v << '\n';
}

inline InvPerm read_perm(std::istream& in) {
  InvPerm perm;
  std::string line;
  Gnum number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (detail::blank(line) || line.find_first_not_of(" \t") == line.find('#')) continue;
    const auto values = detail::parse_integers(line, "permutation line " + std::to_string(number));
    if (values.size() != 1) throw InputError("permutation line " + std::to_string(number) + ": expected one index");
    perm.push_back(values[0]);
  }
  std::vector<char> seen(perm.size(), 0);
  for (Gnum v : perm) {
    if (v < 0 || v >= static_cast<Gnum>(perm.size())) {
      throw InputError("permutation: index " + std::to_string(v) + " out of range (missing index)");
    }
    if (seen[v]) throw InputError("permutation: duplicate index " + std::to_string(v));
    seen[v] = 1;
  }
  return perm;
}

inline InvPerm read_perm(const std::string& text) {
  std::istringstream in(text);
  return read_perm(in);
}

}  // namespace ndorder

#endif  // NDORDER_IO_HPP_
