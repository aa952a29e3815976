#include "progle/spectral.hpp"

#include <cmath>
#include <string>

#include "progle/errors.hpp"
#include "progle/rng.hpp"
#include "progle/svd.hpp"

namespace progle {

double bessel_i(int order, double theta) {
  if (order < 0 || order > 64)
    throw ValidationError("bessel_i: order must lie in [0, 64], got " + std::to_string(order));
  if (!(theta >= 0.0 && theta <= 100.0))
    throw ValidationError("bessel_i: theta must lie in [0, 100], got " + std::to_string(theta));
  if (theta == 0.0) return order == 0 ? 1.0 : 0.0;
  return std::cyl_bessel_i(static_cast<double>(order), theta);
}

std::vector<double> chebyshev_coefficients(double theta, int k) {
  if (k < 1) throw ValidationError("chebyshev_coefficients: k must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(k));
  c[0] = bessel_i(0, theta);
  for (int i = 1; i < k; ++i) c[i] = (i % 2 == 0 ? 2.0 : -2.0) * bessel_i(i, theta);
  return c;
}

FilterSpec FilterSpec::make(double mu, double theta, int cheb_order) {
  if (!(mu >= 0.0 && mu <= 2.0))
    throw ValidationError("filter: mu must lie in [0, 2], got " + std::to_string(mu));
  if (!(theta >= 0.0))
    throw ValidationError("filter: theta must be >= 0, got " + std::to_string(theta));
  if (cheb_order < 1 || cheb_order > 65)
    throw ValidationError("filter: Chebyshev term count must lie in [1, 65]");
  FilterSpec spec;
  spec.mu = mu;
  spec.theta = theta;
  spec.cheb_order = cheb_order;
  spec.coefficients = chebyshev_coefficients(theta, cheb_order);
  return spec;
}

namespace {

// Largest eigenvalue of I - D^{-1/2} A D^{-1/2} (same spectrum as the
// random-walk Laplacian) by power iteration with a fixed Rayleigh readout.
double estimate_lambda_max(const SparseGraph& g, int iterations) {
  std::vector<double> dinv_sqrt(static_cast<std::size_t>(g.n), 0.0);
  for (index_t i = 0; i < g.n; ++i)
    if (g.degree[i] > 0.0) dinv_sqrt[i] = 1.0 / std::sqrt(g.degree[i]);

  CounterRng rng(0x9a5eC7B1u);
  DenseVector x(g.n);
  for (index_t i = 0; i < g.n; ++i) x[i] = rng.normal();
  x.normalize();

  auto apply_sym = [&](const DenseVector& v) {
    DenseVector scaled(g.n);
    for (index_t i = 0; i < g.n; ++i) scaled[i] = dinv_sqrt[i] * v[i];
    DenseVector av = g.adjacency.multiply(scaled);
    DenseVector out(g.n);
    for (index_t i = 0; i < g.n; ++i) out[i] = v[i] - dinv_sqrt[i] * av[i];
    return out;
  };

  double rayleigh = 0.0;
  for (int it = 0; it < iterations; ++it) {
    DenseVector y = apply_sym(x);
    rayleigh = x.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) break;
    x = y / norm;
  }
  return rayleigh;
}

}  // namespace

ScaledLaplacianOp::ScaledLaplacianOp(const SparseGraph& g, double mu, bool rescale)
    : n_(g.n), mu_(mu) {
  SparseMatrix lap = rw_laplacian(g);
  // Shift the merged diagonal in place: (L - mu I).
  shifted_ = std::move(lap);
  {
    std::vector<index_t> offsets(shifted_.offsets().begin(), shifted_.offsets().end());
    std::vector<std::int32_t> indices(shifted_.indices().begin(), shifted_.indices().end());
    std::vector<double> values(shifted_.values().begin(), shifted_.values().end());
    for (index_t i = 0; i < n_; ++i)
      for (index_t k = offsets[i]; k < offsets[i + 1]; ++k)
        if (indices[k] == i) values[k] -= mu;
    shifted_ = SparseMatrix(n_, n_, std::move(offsets), std::move(indices), std::move(values));
  }

  if (rescale) {
    lambda_max_ = estimate_lambda_max(g, 30);
    const double lam = std::min(2.0, lambda_max_ * 1.01);  // margin; 2 is the spectral bound
    if ((lambda_max_ - mu_) * (lambda_max_ - mu_) > 2.0) {
      scale_ = std::max(1.0, 0.5 * ((lam - mu_) * (lam - mu_) - 1.0));
    }
  }
}

DenseMatrix ScaledLaplacianOp::apply(const DenseMatrix& x) const {
  if (x.rows() != n_) throw ValidationError("scaled Laplacian: row count mismatch");
  ++apply_count_;
  DenseMatrix inner = shifted_.multiply(x);
  DenseMatrix outer = shifted_.multiply(inner);
  sparse_product_count_ += 2;
  return (-0.5 / scale_) * (outer - x);
}

DenseMatrix apply_modulated_laplacian(const ScaledLaplacianOp& lbar, const FilterSpec& spec,
                                      const DenseMatrix& x) {
  if (x.rows() != lbar.nodes())
    throw ValidationError("modulated propagation: input has " + std::to_string(x.rows()) +
                          " rows, graph has " + std::to_string(lbar.nodes()) + " nodes");

  // The kernel g(lambda) = exp(-0.5 [(lambda-mu)^2 - 1] theta) equals
  // exp(theta' * lambda_bar) on the operator's eigenvalues lambda_bar, with
  // theta' = theta * scale absorbing any spectrum rescale. Since
  // T_i(-X) = (-1)^i T_i(X), expanding exp(theta' x) over T_i(Lbar) uses the
  // stored alternating coefficients of exp(-theta' x) with their signs
  // flipped on odd terms, i.e. all-positive weights [I_0, 2 I_1, 2 I_2, ...].
  const int k = spec.cheb_order;
  std::vector<double> weight(static_cast<std::size_t>(k));
  if (lbar.scale() == 1.0) {
    for (int i = 0; i < k; ++i)
      weight[i] = (i % 2 == 0) ? spec.coefficients[i] : -spec.coefficients[i];
  } else {
    const double theta_eff = spec.theta * lbar.scale();
    weight[0] = bessel_i(0, theta_eff);
    for (int i = 1; i < k; ++i) weight[i] = 2.0 * bessel_i(i, theta_eff);
  }

  DenseMatrix acc = weight[0] * x;
  if (k == 1) return acc;
  DenseMatrix prev = x;
  DenseMatrix cur = lbar.apply(x);
  acc += weight[1] * cur;
  for (int i = 2; i < k; ++i) {
    DenseMatrix next = 2.0 * lbar.apply(cur) - prev;
    acc += weight[i] * next;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return acc;
}

DenseMatrix propagate_linear(const SparseGraph& g, const FilterSpec& spec, const DenseMatrix& x,
                             bool rescale) {
  const ScaledLaplacianOp lbar(g, spec.mu, rescale);
  const DenseMatrix modulated = apply_modulated_laplacian(lbar, spec, x);
  const DenseMatrix residual = x - modulated;
  return transition_matrix(g).multiply(residual);
}

Embedding propagate(const SparseGraph& g, const FilterSpec& spec, const Embedding& emb,
                    bool rescale) {
  if (emb.nodes() != g.n)
    throw ValidationError("propagate: embedding has " + std::to_string(emb.nodes()) +
                          " rows, graph has " + std::to_string(g.n) + " nodes");
  const DenseMatrix z = propagate_linear(g, spec, emb.vectors, rescale);

  // Propagation bends the SVD basis; mend with a thin SVD, keeping the
  // singular-value scaling (U Sigma) so component energies survive.
  const SvdResult svd = thin_svd_dense(z);
  Embedding out;
  out.vectors = svd.u;
  for (index_t j = 0; j < out.vectors.cols(); ++j)
    out.vectors.col(j) *= svd.singular_values[static_cast<std::size_t>(j)];
  out.provenance = Provenance::propagated;
  out.validate();
  return out;
}

Embedding enhance(const SparseGraph& g, const FilterSpec& spec, const Embedding& external,
                  bool rescale) {
  return propagate(g, spec, external, rescale);
}

}  // namespace progle
