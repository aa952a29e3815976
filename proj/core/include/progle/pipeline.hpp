#pragma once

#include "progle/config.hpp"
#include "progle/embedding.hpp"
#include "progle/graph.hpp"

namespace progle {

struct PhaseTimings {
  double proximity_ms = 0.0;
  double shifted_log_ms = 0.0;
  double factorize_ms = 0.0;   // truncated SVD + scaling
  double propagate_ms = 0.0;   // Chebyshev propagation + mend SVD
  double total_ms = 0.0;

  // Sparse network embedding phase vs. spectral propagation phase.
  double sparse_embedding_ms() const noexcept {
    return proximity_ms + shifted_log_ms + factorize_ms;
  }
};

struct PipelineStats {
  index_t nodes = 0;
  index_t undirected_edges = 0;
  index_t proximity_nnz = 0;
  index_t shifted_log_nnz = 0;
};

struct EmbedResult {
  Embedding raw;    // scaled truncated-SVD embedding of the shifted log matrix
  Embedding final;  // after spectral propagation and re-orthogonalization
  PhaseTimings timings;
  PipelineStats stats;
};

// The whole pipeline: sparse proximity -> shifted log -> truncated SVD ->
// sqrt-singular-value scaling -> band-pass spectral propagation.
EmbedResult embed_graph(const SparseGraph& g, const RunConfig& config);

}  // namespace progle
