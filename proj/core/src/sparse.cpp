#include "progle/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "progle/errors.hpp"

namespace progle {

SparseMatrix::SparseMatrix(index_t rows, index_t cols, std::vector<index_t> offsets,
                           std::vector<std::int32_t> indices, std::vector<double> values)
    : rows_(rows), cols_(cols), offsets_(std::move(offsets)), indices_(std::move(indices)),
      values_(std::move(values)) {
  validate();
}

void SparseMatrix::validate() const {
  if (rows_ < 0 || cols_ < 0) throw ValidationError("sparse matrix: negative dimension");
  if (offsets_.size() != static_cast<std::size_t>(rows_) + 1)
    throw ValidationError("sparse matrix: offsets size mismatch");
  if (offsets_.front() != 0 || offsets_.back() != static_cast<index_t>(indices_.size()) ||
      indices_.size() != values_.size())
    throw ValidationError("sparse matrix: offsets/arrays inconsistent");
  for (index_t i = 0; i < rows_; ++i) {
    if (offsets_[i] > offsets_[i + 1]) throw ValidationError("sparse matrix: offsets not monotone");
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (indices_[k] < 0 || indices_[k] >= cols_)
        throw ValidationError("sparse matrix: column index out of range");
      if (k > offsets_[i] && indices_[k] <= indices_[k - 1])
        throw ValidationError("sparse matrix: columns not strictly increasing in row " +
                              std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(index_t rows, index_t cols,
                                         std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<index_t> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(triplets.size());
  values.reserve(triplets.size());
  std::size_t k = 0;
  while (k < triplets.size()) {
    const index_t r = triplets[k].row;
    const index_t c = triplets[k].col;
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw ValidationError("from_triplets: entry out of range");
    double sum = 0.0;
    while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c)
      sum += triplets[k++].value;
    indices.push_back(static_cast<std::int32_t>(c));
    values.push_back(sum);
    ++offsets[static_cast<std::size_t>(r) + 1];
  }
  for (index_t i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix SparseMatrix::identity(index_t n) {
  std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1);
  std::vector<std::int32_t> indices(static_cast<std::size_t>(n));
  std::vector<double> values(static_cast<std::size_t>(n), 1.0);
  for (index_t i = 0; i <= n; ++i) offsets[i] = i;
  for (index_t i = 0; i < n; ++i) indices[i] = static_cast<std::int32_t>(i);
  return SparseMatrix(n, n, std::move(offsets), std::move(indices), std::move(values));
}

double SparseMatrix::coeff(index_t i, index_t j) const noexcept {
  const auto idx = row_indices(i);
  const auto it = std::lower_bound(idx.begin(), idx.end(), static_cast<std::int32_t>(j));
  if (it == idx.end() || *it != j) return 0.0;
  return values_[offsets_[i] + (it - idx.begin())];
}

DenseVector SparseMatrix::multiply(const DenseVector& x) const {
  DenseVector y(rows_);
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k) acc += values_[k] * x[indices_[k]];
    y[i] = acc;
  }
  return y;
}

DenseVector SparseMatrix::multiply_transpose(const DenseVector& x) const {
  // Scatter form; serial so the accumulation order is fixed.
  DenseVector y = DenseVector::Zero(cols_);
  for (index_t i = 0; i < rows_; ++i)
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k) y[indices_[k]] += values_[k] * x[i];
  return y;
}

DenseMatrix SparseMatrix::multiply(const DenseMatrix& x) const {
  if (x.rows() != cols_) throw ValidationError("spmm: dimension mismatch");
  DenseMatrix y = DenseMatrix::Zero(rows_, x.cols());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < rows_; ++i) {
    auto out = y.row(i);
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
      out += values_[k] * x.row(indices_[k]);
  }
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<index_t> offsets(static_cast<std::size_t>(cols_) + 1, 0);
  for (const auto j : indices_) ++offsets[static_cast<std::size_t>(j) + 1];
  for (index_t j = 0; j < cols_; ++j) offsets[j + 1] += offsets[j];
  std::vector<std::int32_t> indices(values_.size());
  std::vector<double> values(values_.size());
  std::vector<index_t> cursor(offsets.begin(), offsets.end() - 1);
  for (index_t i = 0; i < rows_; ++i)
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const auto pos = cursor[indices_[k]]++;
      indices[pos] = static_cast<std::int32_t>(i);
      values[pos] = values_[k];
    }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(indices), std::move(values));
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> sums(static_cast<std::size_t>(rows_), 0.0);
  for (index_t i = 0; i < rows_; ++i)
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sums[i] += values_[k];
  return sums;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("add: dimension mismatch");
  std::vector<index_t> offsets(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  for (index_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row_indices(i), bi = b.row_indices(i);
    const auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ai.size() || q < bi.size()) {
      std::int32_t col;
      double val;
      if (q >= bi.size() || (p < ai.size() && ai[p] < bi[q])) {
        col = ai[p]; val = av[p]; ++p;
      } else if (p >= ai.size() || bi[q] < ai[p]) {
        col = bi[q]; val = bv[q]; ++q;
      } else {
        col = ai[p]; val = av[p] + bv[q]; ++p; ++q;
      }
      indices.push_back(col);
      values.push_back(val);
    }
    offsets[i + 1] = static_cast<index_t>(indices.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(indices),
                      std::move(values));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(rows_, cols_);
  for (index_t i = 0; i < rows_; ++i)
    for (index_t k = offsets_[i]; k < offsets_[i + 1]; ++k) d(i, indices_[k]) = values_[k];
  return d;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const noexcept {
  return rows_ == other.rows_ && cols_ == other.cols_ && offsets_ == other.offsets_ &&
         indices_ == other.indices_;
}

}  // namespace progle
