#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "progle/sparse.hpp"

namespace progle {

// Bijective mapping between external node labels and dense internal indices.
// Indices are assigned by first appearance in the edge file, so the mapping
// is stable for a given input.
class NodeIdMap {
 public:
  // Returns the index of `label`, inserting it if unseen.
  index_t intern(const std::string& label);

  // Index of `label`, or -1 when absent.
  index_t find(const std::string& label) const;

  const std::string& label(index_t index) const { return labels_.at(index); }
  index_t size() const noexcept { return static_cast<index_t>(labels_.size()); }

  // True when every label is the decimal form of its own index.
  bool is_identity() const;

  static NodeIdMap identity(index_t n);

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, index_t> index_;
};

// Immutable undirected weighted graph. The adjacency matrix is symmetric,
// has no self-loops, and every stored weight is positive. degree[i] is the
// sum of the weights in row i.
struct SparseGraph {
  index_t n = 0;
  SparseMatrix adjacency;
  std::vector<double> degree;

  static SparseGraph from_adjacency(SparseMatrix adjacency);
  index_t undirected_edge_count() const noexcept { return adjacency.nnz() / 2; }
};

struct LoadedGraph {
  SparseGraph graph;
  NodeIdMap ids;
  index_t self_loops_dropped = 0;
};

// Edge-list file: UTF-8 text, one edge per line ("u v" or "u v w"),
// whitespace-separated, '#'-prefixed comment lines ignored. An optional
// leading "% N" header fixes the node count; in that mode labels must be
// integers in [0, N) and isolated nodes are kept. Input is symmetrized and
// duplicate edges have their weights summed; self-loops are dropped.
LoadedGraph load_edge_list(const std::string& path, bool weighted);

// Inverse of load_edge_list for any graph that loader can produce: writes a
// "% n" header when the id map is the integer identity (preserving isolated
// nodes), then one line per undirected edge with round-trip-exact weights.
void save_edge_list(const std::string& path, const SparseGraph& g, const NodeIdMap& ids);

// "external_label internal_index" per line.
void save_node_id_map(const std::string& path, const NodeIdMap& ids);
NodeIdMap load_node_id_map(const std::string& path);

// P = D^{-1} A. Rows of zero-degree nodes are all-zero.
SparseMatrix transition_matrix(const SparseGraph& g);

// L = I - D^{-1} A, stored sparse with the diagonal merged in.
SparseMatrix rw_laplacian(const SparseGraph& g);

}  // namespace progle
