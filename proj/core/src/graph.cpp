#include "progle/graph.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "progle/errors.hpp"

namespace progle {

index_t NodeIdMap::intern(const std::string& label) {
  auto [it, inserted] = index_.try_emplace(label, static_cast<index_t>(labels_.size()));
  if (inserted) labels_.push_back(label);
  return it->second;
}

index_t NodeIdMap::find(const std::string& label) const {
  const auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

bool NodeIdMap::is_identity() const {
  for (index_t i = 0; i < size(); ++i)
    if (labels_[i] != std::to_string(i)) return false;
  return true;
}

NodeIdMap NodeIdMap::identity(index_t n) {
  NodeIdMap map;
  for (index_t i = 0; i < n; ++i) map.intern(std::to_string(i));
  return map;
}

SparseGraph SparseGraph::from_adjacency(SparseMatrix adjacency) {
  if (adjacency.rows() != adjacency.cols())
    throw ValidationError("graph adjacency must be square");
  SparseGraph g;
  g.n = adjacency.rows();
  g.degree = adjacency.row_sums();
  g.adjacency = std::move(adjacency);
  for (index_t i = 0; i < g.n; ++i) {
    const auto idx = g.adjacency.row_indices(i);
    const auto val = g.adjacency.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] == i) throw ValidationError("graph adjacency has a self-loop");
      if (!(val[k] > 0.0)) throw ValidationError("graph adjacency has a non-positive weight");
      if (g.adjacency.coeff(idx[k], i) != val[k])
        throw ValidationError("graph adjacency is not symmetric");
    }
  }
  return g;
}

namespace {

bool is_blank(const std::string& line) {
  for (const char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_weight(const std::string& tok, std::size_t lineno) {
  double w = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, w);
  if (ec != std::errc() || ptr != last)
    throw ParseError("edge list line " + std::to_string(lineno) + ": bad weight '" + tok + "'");
  if (!std::isfinite(w))
    throw ValidationError("edge list line " + std::to_string(lineno) + ": non-finite weight");
  return w;
}

index_t parse_header_count(const std::string& line, std::size_t lineno) {
  const auto toks = split_ws(line.substr(1));
  if (toks.size() != 1)
    throw ParseError("edge list line " + std::to_string(lineno) + ": header must be '% N'");
  index_t n = 0;
  const auto [ptr, ec] = std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), n);
  if (ec != std::errc() || ptr != toks[0].data() + toks[0].size() || n < 0)
    throw ParseError("edge list line " + std::to_string(lineno) + ": bad node count");
  return n;
}

}  // namespace

LoadedGraph load_edge_list(const std::string& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge list: " + path);

  LoadedGraph out;
  index_t declared_n = -1;
  std::vector<Triplet> triplets;
  std::string line;
  std::size_t lineno = 0;
  bool saw_edge = false;

  auto resolve = [&](const std::string& label, std::size_t ln) -> index_t {
    if (declared_n >= 0) {
      index_t id = 0;
      const auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), id);
      if (ec != std::errc() || ptr != label.data() + label.size())
        throw ParseError("edge list line " + std::to_string(ln) +
                         ": non-integer label '" + label + "' with '% N' header");
      if (id < 0 || id >= declared_n)
        throw ValidationError("edge list line " + std::to_string(ln) + ": label " + label +
                              " out of declared range [0, " + std::to_string(declared_n) + ")");
      return id;
    }
    return out.ids.intern(label);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line) || line[0] == '#') continue;
    if (line[0] == '%') {
      if (saw_edge || declared_n >= 0)
        throw ParseError("edge list line " + std::to_string(lineno) +
                         ": '% N' header allowed once, before any edge");
      declared_n = parse_header_count(line, lineno);
      continue;
    }
    const auto toks = split_ws(line);
    if (toks.size() != 2 && toks.size() != 3)
      throw ParseError("edge list line " + std::to_string(lineno) +
                       ": expected 'u v' or 'u v w'");
    double w = 1.0;
    if (toks.size() == 3 && weighted) {
      w = parse_weight(toks[2], lineno);
      if (w <= 0.0)
        throw ValidationError("edge list line " + std::to_string(lineno) +
                              ": weight must be > 0");
    } else if (toks.size() == 2 && weighted) {
      throw ParseError("edge list line " + std::to_string(lineno) +
                       ": weighted load requires 'u v w'");
    }
    saw_edge = true;
    const index_t u = resolve(toks[0], lineno);
    const index_t v = resolve(toks[1], lineno);
    if (u == v) {
      ++out.self_loops_dropped;
      continue;
    }
    triplets.push_back({u, v, w});
    triplets.push_back({v, u, w});
  }

  const index_t n = declared_n >= 0 ? declared_n : out.ids.size();
  if (declared_n >= 0) out.ids = NodeIdMap::identity(declared_n);
  out.graph = SparseGraph::from_adjacency(SparseMatrix::from_triplets(n, n, std::move(triplets)));
  return out;
}

void save_edge_list(const std::string& path, const SparseGraph& g, const NodeIdMap& ids) {
  if (ids.size() != g.n) throw ValidationError("save_edge_list: id map size mismatch");
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot open for writing: " + path);
  char buf[32];
  if (ids.is_identity()) outf << "% " << g.n << "\n";
  for (index_t i = 0; i < g.n; ++i) {
    const auto idx = g.adjacency.row_indices(i);
    const auto val = g.adjacency.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] < i) continue;  // each undirected edge once
      std::snprintf(buf, sizeof buf, "%.17g", val[k]);
      outf << ids.label(i) << ' ' << ids.label(idx[k]) << ' ' << buf << '\n';
    }
  }
  if (!outf) throw ParseError("write failed: " + path);
}

void save_node_id_map(const std::string& path, const NodeIdMap& ids) {
  std::ofstream outf(path);
  if (!outf) throw ParseError("cannot open for writing: " + path);
  for (index_t i = 0; i < ids.size(); ++i) outf << ids.label(i) << ' ' << i << '\n';
  if (!outf) throw ParseError("write failed: " + path);
}

NodeIdMap load_node_id_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open node id map: " + path);
  NodeIdMap ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 2)
      throw ParseError("node id map line " + std::to_string(lineno) + ": expected 'label index'");
    const index_t got = ids.intern(toks[0]);
    if (std::to_string(got) != toks[1])
      throw ParseError("node id map line " + std::to_string(lineno) + ": indices not dense");
  }
  return ids;
}

SparseMatrix transition_matrix(const SparseGraph& g) {
  std::vector<index_t> offsets(g.adjacency.offsets().begin(), g.adjacency.offsets().end());
  std::vector<std::int32_t> indices(g.adjacency.indices().begin(), g.adjacency.indices().end());
  std::vector<double> values(g.adjacency.values().begin(), g.adjacency.values().end());
  for (index_t i = 0; i < g.n; ++i) {
    const double d = g.degree[i];
    if (d <= 0.0) continue;  // zero-degree rows stay all-zero (they are empty)
    for (index_t k = offsets[i]; k < offsets[i + 1]; ++k) values[k] /= d;
  }
  return SparseMatrix(g.n, g.n, std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix rw_laplacian(const SparseGraph& g) {
  const SparseMatrix p = transition_matrix(g);
  std::vector<index_t> offsets(static_cast<std::size_t>(g.n) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(p.nnz() + g.n);
  values.reserve(p.nnz() + g.n);
  for (index_t i = 0; i < g.n; ++i) {
    const auto idx = p.row_indices(i);
    const auto val = p.row_values(i);
    bool placed_diag = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!placed_diag && idx[k] > i) {
        indices.push_back(static_cast<std::int32_t>(i));
        values.push_back(1.0);
        placed_diag = true;
      }
      indices.push_back(idx[k]);
      values.push_back(-val[k]);  // no self-loops, so the diagonal of P is empty
    }
    if (!placed_diag) {
      indices.push_back(static_cast<std::int32_t>(i));
      values.push_back(1.0);
    }
    offsets[i + 1] = static_cast<index_t>(indices.size());
  }
  return SparseMatrix(g.n, g.n, std::move(offsets), std::move(indices), std::move(values));
}

}  // namespace progle
