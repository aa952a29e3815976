#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace progle {

// Dense matrices are row-major throughout: embeddings are accessed row-wise
// (one row per node) and CSR-times-dense kernels stream contiguous rows.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DenseVector = Eigen::VectorXd;

using index_t = std::int64_t;

struct Triplet {
  index_t row = 0;
  index_t col = 0;
  double value = 0.0;
};

// Immutable real sparse matrix in compressed sparse row form.
// Invariants: offsets monotone nondecreasing with offsets[0] == 0 and
// offsets[rows] == nnz; column indices strictly increasing within each row
// (hence no duplicates) and in [0, cols).
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(index_t rows, index_t cols, std::vector<index_t> offsets,
               std::vector<std::int32_t> indices, std::vector<double> values);

  // Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(index_t rows, index_t cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(index_t n);

  index_t rows() const noexcept { return rows_; }
  index_t cols() const noexcept { return cols_; }
  index_t nnz() const noexcept { return static_cast<index_t>(values_.size()); }

  std::span<const index_t> offsets() const noexcept { return offsets_; }
  std::span<const std::int32_t> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const std::int32_t> row_indices(index_t i) const noexcept {
    return {indices_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }
  std::span<const double> row_values(index_t i) const noexcept {
    return {values_.data() + offsets_[i], static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }

  // Value at (i, j), 0 if absent. Binary search within the row.
  double coeff(index_t i, index_t j) const noexcept;

  DenseVector multiply(const DenseVector& x) const;
  DenseVector multiply_transpose(const DenseVector& x) const;
  // Sparse times dense block; parallel over output rows, deterministic for
  // any thread count (each row is an independent serial accumulation).
  DenseMatrix multiply(const DenseMatrix& x) const;

  SparseMatrix transpose() const;

  // Same pattern, every stored value replaced by f(value).
  template <typename F>
  SparseMatrix map_values(F&& f) const {
    std::vector<double> mapped(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) mapped[k] = f(values_[k]);
    return SparseMatrix(rows_, cols_, offsets_, indices_, std::move(mapped));
  }

  std::vector<double> row_sums() const;

  // Entrywise sum; patterns are merged.
  friend SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b);

  DenseMatrix to_dense() const;

  bool same_pattern(const SparseMatrix& other) const noexcept;

 private:
  void validate() const;

  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<index_t> offsets_ = {0};
  std::vector<std::int32_t> indices_;
  std::vector<double> values_;
};

}  // namespace progle
