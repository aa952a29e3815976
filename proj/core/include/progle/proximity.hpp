#pragma once

#include <cstdint>

#include "progle/graph.hpp"
#include "progle/sparse.hpp"

namespace progle {

// Sparse row-stochastic node-context weight matrix. The support doubles as
// the node-context pair set: pair (i, j) is modeled iff matrix(i, j) != 0.
struct ProximityMatrix {
  SparseMatrix matrix;
  int order = 1;          // m
  double dropout = 0.0;   // eta
  std::uint64_t seed = 0;

  index_t nnz() const noexcept { return matrix.nnz(); }
  // Stored entries per n^2 cells; the whole point is that this stays small.
  double density() const noexcept {
    const double n = static_cast<double>(matrix.rows());
    return n == 0.0 ? 0.0 : static_cast<double>(matrix.nnz()) / (n * n);
  }
};

// Independent per-undirected-edge dropout: each edge of A is retained with
// probability 1 - eta, both directions together so the result stays
// symmetric. Retained entries keep their weights. Deterministic given seed.
SparseMatrix dropout_adjacency(const SparseGraph& g, double eta, std::uint64_t seed);

// Support indicator: same pattern, every stored value becomes 1.
SparseMatrix binarize_support(const SparseMatrix& x);

// Attenuated sum of transition powers restricted to dropout-masked supports:
//
//   sum_{i=1..m}  (D^{-1}A)^i  restricted to  support(A * Ahat_1 * ... * Ahat_{i-1})
//
// followed by row normalization. Ahat_1..Ahat_{m-1} are drawn by
// dropout_adjacency with seeds derived from `seed` (stream j for Ahat_j).
// Masked entries are computed exactly, and only entries inside the mask
// support are ever materialized; no n-by-n intermediate exists at any point.
ProximityMatrix build_proximity(const SparseGraph& g, int order, double eta, std::uint64_t seed);

}  // namespace progle
