#pragma once

#include <string>
#include <vector>

#include "progle/config.hpp"
#include "progle/embedding.hpp"
#include "progle/eval.hpp"
#include "progle/graph.hpp"
#include "progle/sparse.hpp"

namespace progle {

// Text embedding format (word2vec convention): header "n d", then one
// "label v1 ... vd" line per node. Values are written with %.17g so that
// save/load round-trips bit for bit.
void save_embedding_text(const std::string& path, const Embedding& emb, const NodeIdMap& ids);

struct LoadedEmbedding {
  Embedding embedding;
  NodeIdMap ids;
};
LoadedEmbedding load_embedding_text(const std::string& path);

// Raw little-endian float64 row-major matrix plus a JSON sidecar
// (path + ".meta.json") carrying shape, labels, and the run config.
void save_embedding_binary(const std::string& path, const Embedding& emb, const NodeIdMap& ids,
                           const RunConfig& config);
LoadedEmbedding load_embedding_binary(const std::string& path);

// Label file: "node_label label1 label2 ..." per line; label ids are
// assigned by first appearance. Node labels must resolve through `ids`.
struct LoadedLabels {
  LabelSet set;
  std::vector<std::string> label_names;
};
LoadedLabels load_labels(const std::string& path, const NodeIdMap& ids);

// Coordinate text dump: "% rows cols nnz" header then "i j value" lines.
void dump_coordinate(const std::string& path, const SparseMatrix& m);

// Reorders embedding rows from their own id map onto the graph's id map.
// Throws AlignmentError naming (up to 10 of) the missing/extra labels.
Embedding align_embedding(const LoadedEmbedding& loaded, const NodeIdMap& graph_ids);

}  // namespace progle
