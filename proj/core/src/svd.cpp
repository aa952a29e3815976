#include "progle/svd.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "progle/errors.hpp"
#include "progle/rng.hpp"

namespace progle {

void Embedding::validate() const {
  if (!vectors.allFinite()) throw ValidationError("embedding contains NaN or Inf");
  if (dim() >= nodes() && nodes() > 0)
    std::fprintf(stderr, "warning: embedding dimension %lld >= node count %lld\n",
                 static_cast<long long>(dim()), static_cast<long long>(nodes()));
}

const char* provenance_name(Provenance p) noexcept {
  switch (p) {
    case Provenance::raw_svd: return "raw-svd";
    case Provenance::propagated: return "propagated";
    case Provenance::external: return "external";
  }
  return "unknown";
}

namespace {

// Classical Gram-Schmidt against the first `count` columns of basis,
// blocked as two matrix-vector products per pass so the basis is streamed
// once instead of column by column. A second pass runs only when the first
// one cancelled most of the vector (DGKS criterion), which is when lost
// orthogonality would otherwise survive.
void reorthogonalize(const Eigen::MatrixXd& basis, Eigen::Index count, Eigen::VectorXd& x) {
  const auto block = basis.leftCols(count);
  const double before = x.norm();
  x -= block * (block.transpose() * x);
  if (x.norm() < 0.7071 * before) x -= block * (block.transpose() * x);
}

Eigen::VectorXd random_unit(CounterRng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  return norm > 0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Unit(n, 0);
}

struct BandSvd {
  Eigen::MatrixXd u;   // k x k, left singular vectors
  Eigen::VectorXd s;   // descending
  Eigen::MatrixXd vt;  // k x k
};

// SVD of the upper-bidiagonal projection (diag = alpha, super = beta) via
// LAPACK's divide-and-conquer bidiagonal solver; far cheaper than a dense
// k-by-k SVD and exact for the band.
BandSvd bidiagonal_svd(const std::vector<double>& alpha, const std::vector<double>& beta,
                       Eigen::Index k) {
  BandSvd out;
  out.s = Eigen::VectorXd(k);
  for (Eigen::Index i = 0; i < k; ++i) out.s[i] = alpha[i];
  std::vector<double> super(static_cast<std::size_t>(std::max<Eigen::Index>(k - 1, 1)), 0.0);
  for (Eigen::Index i = 0; i + 1 < k; ++i) super[i] = beta[i];
  out.u = Eigen::MatrixXd(k, k);
  out.vt = Eigen::MatrixXd(k, k);
  const auto info = LAPACKE_dbdsdc(LAPACK_COL_MAJOR, 'U', 'I', static_cast<lapack_int>(k),
                                   out.s.data(), super.data(), out.u.data(),
                                   static_cast<lapack_int>(k), out.vt.data(),
                                   static_cast<lapack_int>(k), nullptr, nullptr);
  if (info != 0)
    throw std::runtime_error("bidiagonal SVD failed with LAPACK info " + std::to_string(info));
  return out;
}

}  // namespace

SvdResult truncated_svd(const LinearOperator& op, int rank, double tol, std::uint64_t seed) {
  const index_t nr = op.rows();
  const index_t nc = op.cols();
  const index_t min_dim = std::min(nr, nc);
  if (rank < 1) throw ValidationError("truncated_svd: rank must be >= 1");
  if (rank >= min_dim)
    throw ValidationError("truncated_svd: rank " + std::to_string(rank) +
                          " must be < min(rows, cols) = " + std::to_string(min_dim));
  if (!(tol > 0.0)) throw ValidationError("truncated_svd: tolerance must be > 0");

  const index_t budget = 50 * static_cast<index_t>(rank);  // products per side
  const index_t max_basis = std::min<index_t>(min_dim, std::max<index_t>(budget, rank + 2));

  // Grow the Krylov storage geometrically; preallocating the budget-sized
  // basis would dwarf every other allocation at large n.
  Eigen::Index capacity =
      static_cast<Eigen::Index>(std::min<index_t>(max_basis, rank + 32));
  Eigen::MatrixXd vbasis(nc, capacity);
  Eigen::MatrixXd ubasis(nr, capacity);
  auto ensure_capacity = [&](Eigen::Index needed) {
    if (needed <= capacity) return;
    capacity = std::min<Eigen::Index>(static_cast<Eigen::Index>(max_basis),
                                      std::max(needed, capacity + capacity / 2));
    vbasis.conservativeResize(Eigen::NoChange, capacity);
    ubasis.conservativeResize(Eigen::NoChange, capacity);
  };
  std::vector<double> alpha;
  std::vector<double> beta;

  CounterRng rng(seed);
  double scale_est = 0.0;  // largest band entry seen; sets the breakdown threshold

  // alpha_0 u_0 = A v_0
  vbasis.col(0) = random_unit(rng, nc);
  {
    Eigen::VectorXd u = op.apply(vbasis.col(0));
    double a = u.norm();
    scale_est = std::max(scale_est, a);
    if (a > scale_est * 1e-14 && a > 0.0) {
      ubasis.col(0) = u / a;
    } else {
      a = 0.0;
      ubasis.col(0) = random_unit(rng, nr);
    }
    alpha.push_back(a);
  }

  // Convergence checks cost a dense SVD of the projected band; space them
  // geometrically so their total cost stays a fraction of the iteration.
  Eigen::Index next_check = rank + 1;
  double worst_rel_residual = std::numeric_limits<double>::infinity();
  // After a breakdown restart the Krylov space is exactly invariant but may
  // still miss copies of degenerate singular values living in the orthogonal
  // complement; hold off convergence for `rank` more steps (a full basis is
  // always conclusive).
  Eigen::Index no_convergence_before = 0;

  auto extract = [&](Eigen::Index k, const BandSvd& band) {
    SvdResult out;
    out.u = ubasis.leftCols(k) * band.u.leftCols(rank);
    out.v = vbasis.leftCols(k) * band.vt.topRows(rank).transpose();
    out.singular_values.assign(band.s.data(), band.s.data() + rank);
    return out;
  };

  while (true) {
    const auto k = static_cast<Eigen::Index>(alpha.size());
    ensure_capacity(k + 1);

    // beta_{k-1} v_k = A^T u_{k-1} - alpha_{k-1} v_{k-1}
    Eigen::VectorXd r = op.apply_transpose(ubasis.col(k - 1));
    r -= alpha[k - 1] * vbasis.col(k - 1);
    reorthogonalize(vbasis, k, r);
    double b = r.norm();
    scale_est = std::max(scale_est, b);
    const bool v_breakdown = !(b > scale_est * 1e-14);
    if (v_breakdown) {
      b = 0.0;
      no_convergence_before = k + rank;
    }
    beta.push_back(b);

    // Convergence test on the k-by-k upper bidiagonal projection. The
    // residual of Ritz triplet i is beta_k * |last entry of left vector i|.
    const bool at_cap = k >= max_basis || static_cast<index_t>(k) >= budget;
    const bool full_basis = k >= min_dim;
    if (k >= rank + 1 && (k >= next_check || at_cap || b == 0.0)) {
      next_check = std::max<Eigen::Index>(k + 8, k + k / 8);
      const BandSvd band = bidiagonal_svd(alpha, beta, k);
      const double top = std::max(band.s[0], 1e-300);
      double worst = 0.0;
      for (int i = 0; i < rank; ++i)
        worst = std::max(worst, b * std::abs(band.u(k - 1, i)));
      worst_rel_residual = worst / top;
      if (worst <= tol * top && (k >= no_convergence_before || full_basis))
        return extract(k, band);
      if (at_cap)
        throw ConvergenceError(
            "truncated_svd: no convergence within " + std::to_string(budget) +
                " products per side (relative residual " + std::to_string(worst_rel_residual) +
                ")",
            worst_rel_residual);
    }

    if (v_breakdown) {
      // Invariant subspace hit before convergence: continue in a fresh
      // random direction orthogonal to everything found so far.
      Eigen::VectorXd f = random_unit(rng, nc);
      reorthogonalize(vbasis, k, f);
      const double fn = f.norm();
      if (fn <= 1e-8) {
        // Space exhausted; the projection above must already be exact.
        throw ConvergenceError("truncated_svd: subspace exhausted before convergence",
                               worst_rel_residual);
      }
      vbasis.col(k) = f / fn;
    } else {
      vbasis.col(k) = r / b;
    }

    // alpha_k u_k = A v_k - beta_{k-1} u_{k-1}
    Eigen::VectorXd s = op.apply(vbasis.col(k));
    s -= beta[k - 1] * ubasis.col(k - 1);
    reorthogonalize(ubasis, k, s);
    double a = s.norm();
    scale_est = std::max(scale_est, a);
    if (!(a > scale_est * 1e-14)) {
      a = 0.0;
      no_convergence_before = k + 1 + rank;
      Eigen::VectorXd f = random_unit(rng, nr);
      reorthogonalize(ubasis, k, f);
      const double fn = f.norm();
      if (fn <= 1e-8)
        throw ConvergenceError("truncated_svd: left space exhausted before convergence",
                               worst_rel_residual);
      ubasis.col(k) = f / fn;
    } else {
      ubasis.col(k) = s / a;
    }
    alpha.push_back(a);
  }
}

SvdResult truncated_svd(const SparseMatrix& m, int rank, double tol, std::uint64_t seed) {
  const SparseOperator op(m);
  return truncated_svd(op, rank, tol, seed);
}

Embedding scale_embedding(const DenseMatrix& u, std::span<const double> sigma) {
  if (static_cast<std::size_t>(u.cols()) != sigma.size())
    throw ValidationError("scale_embedding: dimension mismatch");
  Embedding out;
  out.vectors = u;
  out.provenance = Provenance::raw_svd;
  for (index_t k = 0; k < u.cols(); ++k) {
    if (sigma[k] < 0.0) throw ValidationError("scale_embedding: negative singular value");
    out.vectors.col(k) *= std::sqrt(sigma[k]);
  }
  return out;
}

SvdResult thin_svd_dense(const DenseMatrix& x) {
  if (x.cols() > x.rows()) throw ValidationError("thin_svd_dense: expected a tall matrix");
  const Eigen::MatrixXd xc = x;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out;
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  return out;
}

}  // namespace progle
