#pragma once

#include <cstdint>
#include <vector>

#include "progle/embedding.hpp"
#include "progle/graph.hpp"
#include "progle/sparse.hpp"

namespace progle {

// Modified Bessel function of the first kind, I_order(theta).
// Validated domain: 0 <= order <= 64, 0 <= theta <= 100; accurate to 1e-12
// relative (1e-14 absolute near zero).
double bessel_i(int order, double theta);

// Chebyshev coefficients of exp(-theta x) on [-1, 1]:
//   [I_0(theta), -2 I_1(theta), +2 I_2(theta), -2 I_3(theta), ...]
std::vector<double> chebyshev_coefficients(double theta, int k);

// Band-pass spectral modulator parameters. The kernel acting on the
// random-walk Laplacian spectrum is
//   g(lambda) = exp(-0.5 [(lambda - mu)^2 - 1] theta),
// approximated by `cheb_order` Chebyshev terms with the coefficients above.
struct FilterSpec {
  double mu = 0.1;
  double theta = 0.5;
  int cheb_order = 10;  // k
  std::vector<double> coefficients;

  static FilterSpec make(double mu, double theta, int cheb_order);
};

// Implicit operator Lbar = -1/2 [(L - mu I)^2 - I], applied to dense blocks
// as two sparse products by (L - mu I); the square is never materialized.
//
// With rescaling enabled, the largest Laplacian eigenvalue is estimated by
// 30 power iterations and, when (lambda_max - mu)^2 > 2, the operator is
// divided by a factor that maps its spectrum into [-1, 1] (the Chebyshev
// convergence interval); filter coefficients are then evaluated at the
// correspondingly rescaled exponent argument so the modulated kernel is
// unchanged. Without rescaling the literal operator is applied.
class ScaledLaplacianOp {
 public:
  ScaledLaplacianOp(const SparseGraph& g, double mu, bool rescale);

  // Y = Lbar X / scale. Exactly two sparse products by (L - mu I).
  DenseMatrix apply(const DenseMatrix& x) const;

  index_t nodes() const noexcept { return n_; }
  double mu() const noexcept { return mu_; }
  // Spectrum division factor; 1 when rescaling is off or not triggered.
  double scale() const noexcept { return scale_; }
  double lambda_max_estimate() const noexcept { return lambda_max_; }

  // Operation counters for cost-contract tests.
  std::int64_t apply_count() const noexcept { return apply_count_; }
  std::int64_t sparse_product_count() const noexcept { return sparse_product_count_; }

 private:
  index_t n_ = 0;
  double mu_ = 0.0;
  double scale_ = 1.0;
  double lambda_max_ = 0.0;
  SparseMatrix shifted_;  // L - mu I
  mutable std::int64_t apply_count_ = 0;
  mutable std::int64_t sparse_product_count_ = 0;
};

// Modulated propagation Ltilde x = g(L) x via the three-term Chebyshev
// recurrence R_i = 2 Lbar R_{i-1} - R_{i-2}; k - 1 operator applications,
// never an n-by-n dense intermediate.
DenseMatrix apply_modulated_laplacian(const ScaledLaplacianOp& lbar, const FilterSpec& spec,
                                      const DenseMatrix& x);

// The propagation map before re-orthogonalization:
//   Z = D^{-1}A (I - Ltilde) X.
// This is a fixed linear operator in X.
DenseMatrix propagate_linear(const SparseGraph& g, const FilterSpec& spec, const DenseMatrix& x,
                             bool rescale = true);

// Full propagation: Z as above, then re-orthogonalized through a thin SVD
// (output U Sigma, keeping singular-value scaling).
Embedding propagate(const SparseGraph& g, const FilterSpec& spec, const Embedding& emb,
                    bool rescale = true);

// Propagation of an externally trained embedding; identical computation.
Embedding enhance(const SparseGraph& g, const FilterSpec& spec, const Embedding& external,
                  bool rescale = true);

}  // namespace progle
