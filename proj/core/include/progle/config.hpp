#pragma once

#include <cstdint>

namespace progle {

// Knobs shared by the CLI commands. Defaults: d=128, Chebyshev k=10,
// mu=0.1, theta=0.5; order m=2, dropout eta=0.5 and lambda=1 are this
// implementation's defaults and every field is flag-overridable.
struct RunConfig {
  int dim = 128;               // --dim
  int order = 2;               // --order (m)
  double dropout = 0.5;        // --dropout (eta)
  double lambda = 1.0;         // --lambda
  double mu = 0.1;             // --mu
  double theta = 0.5;          // --theta
  int cheb_k = 10;             // --cheb-k
  std::uint64_t seed = 42;     // --seed
  bool clamp_negative = false; // --clamp-negative
  bool no_rescale = false;     // --no-rescale
  int threads = 1;             // --threads (PROGLE_THREADS fallback)
  // Residual tolerance of the truncated factorization. Graph spectra bulk
  // up near the cut at d, so demanding much more than this buys no embedding
  // quality while the Krylov basis grows several-fold.
  double svd_tol = 1e-2;       // --svd-tol
};

}  // namespace progle
