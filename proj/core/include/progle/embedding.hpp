#pragma once

#include "progle/sparse.hpp"

namespace progle {

enum class Provenance { raw_svd, propagated, external };

// Dense per-node representation, one row per node.
struct Embedding {
  DenseMatrix vectors;
  Provenance provenance = Provenance::external;

  index_t nodes() const noexcept { return vectors.rows(); }
  index_t dim() const noexcept { return vectors.cols(); }

  // Throws on NaN/Inf; warns to stderr when dim >= node count.
  void validate() const;
};

const char* provenance_name(Provenance p) noexcept;

}  // namespace progle
