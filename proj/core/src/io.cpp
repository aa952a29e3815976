#include "progle/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "progle/errors.hpp"

namespace progle {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const char* what, std::size_t lineno) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(std::string(what) + " line " + std::to_string(lineno) + ": bad number '" +
                     tok + "'");
  return v;
}

}  // namespace

void save_embedding_text(const std::string& path, const Embedding& emb, const NodeIdMap& ids) {
  if (ids.size() != emb.nodes()) throw ValidationError("embedding / id map size mismatch");
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << emb.nodes() << ' ' << emb.dim() << '\n';
  char buf[32];
  for (index_t i = 0; i < emb.nodes(); ++i) {
    out << ids.label(i);
    for (index_t j = 0; j < emb.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", emb.vectors(i, j));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) throw ParseError("write failed: " + path);
}

LoadedEmbedding load_embedding_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embedding: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("embedding " + path + ": empty file");
  const auto header = split_ws(line);
  if (header.size() != 2) throw ParseError("embedding " + path + ": header must be 'n d'");
  const auto n = static_cast<index_t>(parse_double(header[0], "embedding", 1));
  const auto d = static_cast<index_t>(parse_double(header[1], "embedding", 1));
  if (n < 0 || d < 1) throw ParseError("embedding " + path + ": bad header dimensions");

  LoadedEmbedding out;
  out.embedding.vectors = DenseMatrix(n, d);
  out.embedding.provenance = Provenance::external;
  std::size_t lineno = 1;
  index_t row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (row >= n) throw ParseError("embedding " + path + ": more rows than header declares");
    if (toks.size() != static_cast<std::size_t>(d) + 1)
      throw ParseError("embedding line " + std::to_string(lineno) + ": expected 1 label + " +
                       std::to_string(d) + " values");
    if (out.ids.intern(toks[0]) != row)
      throw ParseError("embedding line " + std::to_string(lineno) + ": duplicate label '" +
                       toks[0] + "'");
    for (index_t j = 0; j < d; ++j)
      out.embedding.vectors(row, j) = parse_double(toks[j + 1], "embedding", lineno);
    ++row;
  }
  if (row != n)
    throw ParseError("embedding " + path + ": header declares " + std::to_string(n) +
                     " rows, found " + std::to_string(row));
  out.embedding.validate();
  return out;
}

void save_embedding_binary(const std::string& path, const Embedding& emb, const NodeIdMap& ids,
                           const RunConfig& config) {
  if (ids.size() != emb.nodes()) throw ValidationError("embedding / id map size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path);
  // Row-major little-endian float64; matches the in-memory layout here.
  static_assert(std::endian::native == std::endian::little, "writer assumes little-endian host");
  out.write(reinterpret_cast<const char*>(emb.vectors.data()),
            static_cast<std::streamsize>(sizeof(double)) * emb.nodes() * emb.dim());
  if (!out) throw ParseError("write failed: " + path);

  nlohmann::json meta;
  meta["rows"] = emb.nodes();
  meta["cols"] = emb.dim();
  meta["dtype"] = "float64-le";
  meta["order"] = "row-major";
  meta["provenance"] = provenance_name(emb.provenance);
  auto labels = nlohmann::json::array();
  for (index_t i = 0; i < ids.size(); ++i) labels.push_back(ids.label(i));
  meta["labels"] = std::move(labels);
  meta["config"] = {{"dim", config.dim},
                    {"order", config.order},
                    {"dropout", config.dropout},
                    {"lambda", config.lambda},
                    {"mu", config.mu},
                    {"theta", config.theta},
                    {"cheb_k", config.cheb_k},
                    {"seed", config.seed},
                    {"clamp_negative", config.clamp_negative},
                    {"no_rescale", config.no_rescale},
                    {"threads", config.threads}};
  std::ofstream meta_out(path + ".meta.json");
  if (!meta_out) throw ParseError("cannot open for writing: " + path + ".meta.json");
  meta_out << meta.dump(2) << '\n';
  if (!meta_out) throw ParseError("write failed: " + path + ".meta.json");
}

LoadedEmbedding load_embedding_binary(const std::string& path) {
  std::ifstream meta_in(path + ".meta.json");
  if (!meta_in) throw ParseError("cannot open sidecar: " + path + ".meta.json");
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("sidecar " + path + ".meta.json: " + e.what());
  }
  LoadedEmbedding out;
  const auto n = meta.at("rows").get<index_t>();
  const auto d = meta.at("cols").get<index_t>();
  for (const auto& label : meta.at("labels")) out.ids.intern(label.get<std::string>());
  if (out.ids.size() != n) throw ParseError("sidecar " + path + ".meta.json: label count mismatch");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open embedding: " + path);
  out.embedding.vectors = DenseMatrix(n, d);
  out.embedding.provenance = Provenance::external;
  in.read(reinterpret_cast<char*>(out.embedding.vectors.data()),
          static_cast<std::streamsize>(sizeof(double)) * n * d);
  if (in.gcount() != static_cast<std::streamsize>(sizeof(double)) * n * d)
    throw ParseError("embedding " + path + ": truncated payload");
  out.embedding.validate();
  return out;
}

LoadedLabels load_labels(const std::string& path, const NodeIdMap& ids) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open label file: " + path);

  LoadedLabels out;
  out.set.n_nodes = ids.size();
  out.set.labels.resize(static_cast<std::size_t>(ids.size()));
  std::unordered_map<std::string, std::int32_t> vocab;
  std::vector<std::string> missing;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() < 2)
      throw ParseError("label file line " + std::to_string(lineno) +
                       ": expected 'node label...'");
    const index_t node = ids.find(toks[0]);
    if (node < 0) {
      if (missing.size() < 10) missing.push_back(toks[0]);
      continue;
    }
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const auto [it, inserted] =
          vocab.try_emplace(toks[t], static_cast<std::int32_t>(out.label_names.size()));
      if (inserted) out.label_names.push_back(toks[t]);
      out.set.labels[node].push_back(it->second);
    }
    auto& ls = out.set.labels[node];
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  }
  if (!missing.empty()) {
    std::string msg = "label file references nodes absent from the graph/embedding:";
    for (const auto& m : missing) msg += " " + m;
    throw AlignmentError(msg);
  }
  out.set.n_labels = static_cast<std::int32_t>(out.label_names.size());
  out.set.validate();
  return out;
}

void dump_coordinate(const std::string& path, const SparseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "% " << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  char buf[32];
  for (index_t i = 0; i < m.rows(); ++i) {
    const auto idx = m.row_indices(i);
    const auto val = m.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", val[k]);
      out << i << ' ' << idx[k] << ' ' << buf << '\n';
    }
  }
  if (!out) throw ParseError("write failed: " + path);
}

Embedding align_embedding(const LoadedEmbedding& loaded, const NodeIdMap& graph_ids) {
  std::vector<std::string> missing, extra;
  for (index_t i = 0; i < graph_ids.size(); ++i)
    if (loaded.ids.find(graph_ids.label(i)) < 0 && missing.size() < 10)
      missing.push_back(graph_ids.label(i));
  for (index_t i = 0; i < loaded.ids.size(); ++i)
    if (graph_ids.find(loaded.ids.label(i)) < 0 && extra.size() < 10)
      extra.push_back(loaded.ids.label(i));
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "embedding/graph label mismatch;";
    if (!missing.empty()) {
      msg += " missing from embedding:";
      for (const auto& m : missing) msg += " " + m;
    }
    if (!extra.empty()) {
      msg += " absent from graph:";
      for (const auto& e : extra) msg += " " + e;
    }
    throw AlignmentError(msg);
  }

  Embedding out;
  out.vectors = DenseMatrix(graph_ids.size(), loaded.embedding.dim());
  for (index_t i = 0; i < graph_ids.size(); ++i)
    out.vectors.row(i) = loaded.embedding.vectors.row(loaded.ids.find(graph_ids.label(i)));
  out.provenance = loaded.embedding.provenance;
  return out;
}

}  // namespace progle
