#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "progle/embedding.hpp"
#include "progle/sparse.hpp"

namespace progle {

// Matrix seen only through products. The truncated SVD touches its input
// exclusively via this interface, which keeps every iteration O(nnz) and
// lets tests count accesses.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual index_t rows() const = 0;
  virtual index_t cols() const = 0;
  virtual DenseVector apply(const DenseVector& x) const = 0;
  virtual DenseVector apply_transpose(const DenseVector& x) const = 0;
};

// Wraps a SparseMatrix; the transpose is materialized once so both product
// directions are row-parallel gathers.
class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(const SparseMatrix& m) : m_(m), mt_(m.transpose()) {}
  index_t rows() const override { return m_.rows(); }
  index_t cols() const override { return m_.cols(); }
  DenseVector apply(const DenseVector& x) const override { return m_.multiply(x); }
  DenseVector apply_transpose(const DenseVector& x) const override { return mt_.multiply(x); }

 private:
  const SparseMatrix& m_;
  SparseMatrix mt_;
};

struct SvdResult {
  DenseMatrix u;                       // rows x d, orthonormal columns
  std::vector<double> singular_values; // descending, nonnegative
  DenseMatrix v;                       // cols x d, orthonormal columns
};

// Rank-d truncated SVD by Golub-Kahan-Lanczos bidiagonalization with full
// reorthogonalization. The Krylov subspace grows until every wanted triplet
// has residual norm(A^T u - sigma v) <= tol * sigma_1, up to a budget of
// 50*d products per side; exceeding the budget without convergence throws
// ConvergenceError carrying the achieved residual.
SvdResult truncated_svd(const LinearOperator& op, int rank, double tol = 1e-8,
                        std::uint64_t seed = 0x5eed);

SvdResult truncated_svd(const SparseMatrix& m, int rank, double tol = 1e-8,
                        std::uint64_t seed = 0x5eed);

// Column k of u scaled by sqrt(sigma_k); the raw network embedding.
Embedding scale_embedding(const DenseMatrix& u, std::span<const double> sigma);

// Exact thin SVD of a dense tall matrix (d <= n).
SvdResult thin_svd_dense(const DenseMatrix& x);

}  // namespace progle
