#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "progle/sparse.hpp"

namespace progle {

// Multi-label ground truth aligned to internal node indices.
struct LabelSet {
  index_t n_nodes = 0;
  std::int32_t n_labels = 0;
  std::vector<std::vector<std::int32_t>> labels;  // per node, sorted, deduplicated

  std::vector<index_t> labeled_nodes() const;
  void validate() const;
};

struct Split {
  std::vector<index_t> train;
  std::vector<index_t> test;
};

// Random disjoint train/test split of the labeled nodes. floor(ratio * count)
// nodes train; deterministic under seed.
Split split(const LabelSet& labels, double ratio, std::uint64_t seed);

// One linear scorer per label (weights row + bias). Labels that had no
// positive or no negative training example fall back to a constant score.
struct OvrClassifier {
  DenseMatrix weights;  // n_labels x dim
  DenseVector bias;     // n_labels
};

// One-vs-rest L2-regularized logistic regression, trained per label by
// full-batch Newton iteration with backtracking line search to gradient norm
// <= 1e-6. The bias is not regularized. Deterministic given data.
OvrClassifier train_ovr_logreg(const DenseMatrix& features, const std::vector<index_t>& train_ids,
                               const LabelSet& labels, double l2);

// Each node receives its k highest-scoring labels; ties break toward the
// smaller label id. Returned sets are sorted by label id.
std::vector<std::vector<std::int32_t>> predict_topk(const OvrClassifier& classifier,
                                                    const DenseMatrix& features,
                                                    const std::vector<index_t>& node_ids,
                                                    const std::vector<std::int32_t>& k_per_node);

// Micro-F1 over pooled counts, macro-F1 as the unweighted mean of per-label
// F1 over labels present in truth or prediction.
std::pair<double, double> micro_macro_f1(const std::vector<std::vector<std::int32_t>>& predicted,
                                         const std::vector<std::vector<std::int32_t>>& truth);

struct EvalRow {
  double ratio = 0.0;
  int trial = 0;
  double micro = 0.0;
  double macro = 0.0;
};

struct RatioSummary {
  double ratio = 0.0;
  int trials = 0;
  double micro_mean = 0.0, micro_std = 0.0;
  double macro_mean = 0.0, macro_std = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<RatioSummary> summaries;
};

// The full protocol: per (ratio, trial) split, train, rank with known label
// counts, score. Standard deviations use the n-1 denominator.
EvalReport run_evaluation(const DenseMatrix& features, const LabelSet& labels,
                          const std::vector<double>& ratios, int trials, std::uint64_t seed,
                          double l2 = 1.0);

}  // namespace progle
