#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "progle/errors.hpp"
#include "progle/pipeline.hpp"
#include "progle/rng.hpp"
#include "progle/spectral.hpp"
#include "progle/svd.hpp"

using namespace progle;

namespace {

DenseMatrix random_dense(index_t rows, index_t cols, std::uint64_t seed) {
  CounterRng rng(seed);
  DenseMatrix x(rows, cols);
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j) x(i, j) = rng.normal();
  return x;
}

double chebyshev_t(int i, double x) {
  if (i == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int t = 2; t <= i; ++t) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

TEST_CASE("bessel_i: exact values at zero") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  for (int i = 1; i <= 8; ++i) CHECK(bessel_i(i, 0.0) == 0.0);
}

TEST_CASE("bessel_i: matches the power-series oracle") {
  for (const double theta : {0.25, 0.5, 1.0, 2.0})
    for (int i = 0; i <= 15; ++i) {
      const double expected = oracle::bessel_series(i, theta);
      const double got = bessel_i(i, theta);
      CHECK(std::abs(got - expected) <= std::max(1e-12 * std::abs(expected), 1e-14));
    }
  // frozen series-oracle values
  CHECK(bessel_i(0, 0.5) == doctest::Approx(1.0634833707413236).epsilon(1e-12));
  CHECK(bessel_i(1, 0.5) == doctest::Approx(0.25789430539089631).epsilon(1e-12));
}

TEST_CASE("bessel_i: quadrature cross-check where the integral resolves") {
  for (const double theta : {0.5, 1.0, 2.0})
    for (int i = 0; i <= 4; ++i) {
      const double q = oracle::bessel_quadrature(i, theta);
      CHECK(bessel_i(i, theta) == doctest::Approx(q).epsilon(1e-11));
    }
}

TEST_CASE("bessel_i: domain validation") {
  CHECK_THROWS_AS(bessel_i(-1, 1.0), ValidationError);
  CHECK_THROWS_AS(bessel_i(65, 1.0), ValidationError);
  CHECK_THROWS_AS(bessel_i(0, -0.5), ValidationError);
  CHECK_THROWS_AS(bessel_i(0, 101.0), ValidationError);
}

TEST_CASE("chebyshev_coefficients: structure and frozen values") {
  SUBCASE("theta = 0 keeps only the constant term") {
    const auto c = chebyshev_coefficients(0.0, 5);
    CHECK(c[0] == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(c[i] == 0.0);
  }
  SUBCASE("theta = 0.5, k = 3 (series-oracle values)") {
    const auto c = chebyshev_coefficients(0.5, 3);
    CHECK(c[0] == doctest::Approx(1.0634833707413236).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(-0.51578861078179261).epsilon(1e-12));
    CHECK(c[2] == doctest::Approx(0.063812298355476513).epsilon(1e-12));
  }
}

TEST_CASE("chebyshev_coefficients: k = 10 approximates exp(-x theta) to 1e-10") {
  const double theta = 0.5;
  const auto c = chebyshev_coefficients(theta, 10);
  double worst = 0.0;
  for (int q = 0; q <= 1000; ++q) {
    const double x = -1.0 + 2.0 * q / 1000.0;
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) acc += c[i] * chebyshev_t(i, x);
    worst = std::max(worst, std::abs(acc - std::exp(-x * theta)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("chebyshev_coefficients: |c_i| strictly decreasing for i >= 1 when theta <= 2") {
  for (const double theta : {0.25, 0.5, 1.0, 2.0}) {
    const auto c = chebyshev_coefficients(theta, 15);
    for (int i = 2; i < 15; ++i) CHECK(std::abs(c[i]) < std::abs(c[i - 1]));
  }
}

TEST_CASE("ScaledLaplacianOp: matches the explicit dense operator") {
  const auto g = oracle::random_connected_graph(60, 0.08, 21);
  const double mu = 0.1;
  const ScaledLaplacianOp op(g, mu, /*rescale=*/false);
  REQUIRE(op.scale() == 1.0);

  const auto x = random_dense(g.n, 7, 4);
  const oracle::Mat l = oracle::Mat::Identity(g.n, g.n) -
                        oracle::dense_transition(oracle::dense_adjacency(g));
  const oracle::Mat shifted = l - mu * oracle::Mat::Identity(g.n, g.n);
  const oracle::Mat expected =
      -0.5 * (shifted * (shifted * oracle::Mat(x)) - oracle::Mat(x));
  CHECK(oracle::max_abs((oracle::Mat(op.apply(x)) - expected).eval()) <= 1e-12);
}

TEST_CASE("apply_modulated_laplacian: theta = 0 is the identity") {
  const auto g = oracle::random_connected_graph(30, 0.1, 2);
  const ScaledLaplacianOp op(g, 0.1, true);
  const auto spec = FilterSpec::make(0.1, 0.0, 10);
  const auto x = random_dense(g.n, 5, 9);
  CHECK(oracle::max_abs((oracle::Mat(apply_modulated_laplacian(op, spec, x)) - oracle::Mat(x)).eval()) == 0.0);
}

TEST_CASE("apply_modulated_laplacian: matches the eigendecomposition oracle") {
  for (const std::uint64_t seed : {31u, 32u}) {
    const auto g = oracle::random_connected_graph(80, 0.06, seed);
    const auto spec = FilterSpec::make(0.1, 0.5, 10);
    const auto x = random_dense(g.n, 6, seed);
    const oracle::Mat expected = oracle::exact_modulated_laplacian(g, 0.1, 0.5) * oracle::Mat(x);

    SUBCASE("with containment rescaling") {
      const ScaledLaplacianOp op(g, 0.1, true);
      const auto got = apply_modulated_laplacian(op, spec, x);
      CHECK(oracle::max_abs((oracle::Mat(got) - expected).eval()) <= 1e-6);
    }
  }
}

TEST_CASE("apply_modulated_laplacian: literal operator on a contained spectrum") {
  // K20: rw-Laplacian eigenvalues {0, n/(n-1)}, well inside mu + sqrt(2)
  const auto g = oracle::complete_graph(20);
  const auto spec = FilterSpec::make(0.1, 0.5, 10);
  const ScaledLaplacianOp op(g, 0.1, /*rescale=*/false);
  const auto x = random_dense(g.n, 4, 77);
  const oracle::Mat expected = oracle::exact_modulated_laplacian(g, 0.1, 0.5) * oracle::Mat(x);
  CHECK(oracle::max_abs((oracle::Mat(apply_modulated_laplacian(op, spec, x)) - expected).eval()) <= 1e-6);
}

TEST_CASE("apply_modulated_laplacian: error non-increasing in k from 2 to 10") {
  const auto g = oracle::random_connected_graph(50, 0.08, 41);
  const auto x = random_dense(g.n, 4, 11);
  const oracle::Mat expected = oracle::exact_modulated_laplacian(g, 0.1, 0.5) * oracle::Mat(x);
  const ScaledLaplacianOp op(g, 0.1, true);
  double prev = 1e300;
  for (int k = 2; k <= 10; ++k) {
    const auto spec = FilterSpec::make(0.1, 0.5, k);
    const double err =
        oracle::max_abs((oracle::Mat(apply_modulated_laplacian(op, spec, x)) - expected).eval());
    CHECK(err <= prev + 1e-13);
    prev = err;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("apply_modulated_laplacian: locality of a point signal") {
  const auto g = oracle::path_graph(30);
  const ScaledLaplacianOp op(g, 0.1, true);
  const auto spec = FilterSpec::make(0.1, 0.5, 10);
  DenseMatrix e = DenseMatrix::Zero(g.n, 1);
  const int source = 15;
  e(source, 0) = 1.0;
  const auto out = apply_modulated_laplacian(op, spec, e);
  // mass concentrates near the source
  for (int i = 0; i < g.n; ++i)
    if (std::abs(i - source) > 4) CHECK(out(source, 0) >= std::abs(out(i, 0)));
  // oracle agrees on the whole column
  const oracle::Mat expected = oracle::exact_modulated_laplacian(g, 0.1, 0.5) * oracle::Mat(e);
  CHECK(oracle::max_abs((oracle::Mat(out) - expected).eval()) <= 1e-6);
}

TEST_CASE("apply_modulated_laplacian: cost contract") {
  const auto g = oracle::random_connected_graph(40, 0.1, 51);
  const int k = 10;
  const ScaledLaplacianOp op(g, 0.1, true);
  const auto spec = FilterSpec::make(0.1, 0.5, k);
  const auto x = random_dense(g.n, 3, 1);
  (void)apply_modulated_laplacian(op, spec, x);
  CHECK(op.apply_count() == k - 1);
  CHECK(op.sparse_product_count() == 2 * (k - 1));
}

TEST_CASE("apply_modulated_laplacian: dimension mismatch") {
  const auto g = oracle::triangle_graph();
  const ScaledLaplacianOp op(g, 0.1, true);
  const auto spec = FilterSpec::make(0.1, 0.5, 5);
  CHECK_THROWS_AS(apply_modulated_laplacian(op, spec, DenseMatrix::Zero(5, 2)), ValidationError);
}

TEST_CASE("propagate_linear: matches the dense propagation oracle") {
  for (const std::uint64_t seed : {61u, 62u}) {
    const auto g = oracle::random_connected_graph(120, 0.04, seed);
    const auto spec = FilterSpec::make(0.1, 0.5, 10);
    const auto x = random_dense(g.n, 8, seed + 5);
    const oracle::Mat expected = oracle::exact_propagate(g, 0.1, 0.5, oracle::Mat(x));
    const auto got = propagate_linear(g, spec, x, true);
    CHECK(oracle::max_abs((oracle::Mat(got) - expected).eval()) <= 1e-6);
  }
}

TEST_CASE("propagate_linear: linear in the embedding") {
  const auto g = oracle::random_connected_graph(40, 0.1, 71);
  const auto spec = FilterSpec::make(0.1, 0.5, 10);
  const auto x = random_dense(g.n, 4, 1);
  const auto y = random_dense(g.n, 4, 2);
  const double alpha = 0.7, beta = -2.25;
  const DenseMatrix combined = propagate_linear(g, spec, alpha * x + beta * y, true);
  const DenseMatrix separate =
      alpha * propagate_linear(g, spec, x, true) + beta * propagate_linear(g, spec, y, true);
  CHECK(oracle::max_abs((oracle::Mat(combined) - oracle::Mat(separate)).eval()) <= 1e-10);
}

TEST_CASE("propagate: theta = 0 gives the zero embedding") {
  const auto g = oracle::random_connected_graph(25, 0.1, 81);
  const auto spec = FilterSpec::make(0.1, 0.0, 10);
  Embedding emb;
  emb.vectors = random_dense(g.n, 4, 3);
  const auto out = propagate(g, spec, emb, true);
  CHECK(oracle::max_abs(oracle::Mat(out.vectors)) <= 1e-14);
  CHECK(out.provenance == Provenance::propagated);
}

TEST_CASE("propagate: output columns are orthogonal") {
  const auto g = oracle::random_connected_graph(60, 0.08, 91);
  const auto spec = FilterSpec::make(0.1, 0.5, 10);
  Embedding emb;
  emb.vectors = random_dense(g.n, 8, 4);
  const auto out = propagate(g, spec, emb, true);
  const oracle::Mat gram = oracle::Mat(out.vectors).transpose() * oracle::Mat(out.vectors);
  const double max_diag = gram.diagonal().cwiseAbs().maxCoeff();
  for (int i = 0; i < gram.rows(); ++i)
    for (int j = 0; j < gram.cols(); ++j)
      if (i != j) CHECK(std::abs(gram(i, j)) <= 1e-8 * max_diag);
}

TEST_CASE("propagate: separates two cliques") {
  const auto g = oracle::two_cliques(12);
  std::vector<std::int32_t> block(24, 0);
  for (int i = 12; i < 24; ++i) block[i] = 1;

  RunConfig cfg;
  cfg.dim = 8;
  cfg.seed = 5;
  const auto result = embed_graph(g, cfg);
  const double gap = oracle::mean_intra_inter_cosine_gap(result.final.vectors, block);
  CHECK(gap > 0.0);
}

TEST_CASE("enhance: same code path as propagate, linear edge cases") {
  const auto g = oracle::random_connected_graph(30, 0.1, 101);
  const auto spec = FilterSpec::make(0.1, 0.5, 10);

  SUBCASE("enhancing the raw embedding equals propagating it") {
    Embedding raw;
    raw.vectors = random_dense(g.n, 5, 6);
    const auto a = propagate(g, spec, raw, true);
    const auto b = enhance(g, spec, raw, true);
    CHECK(oracle::max_abs((oracle::Mat(a.vectors) - oracle::Mat(b.vectors)).eval()) == 0.0);
  }
  SUBCASE("zero in, zero out") {
    Embedding zero;
    zero.vectors = DenseMatrix::Zero(g.n, 5);
    const auto out = enhance(g, spec, zero, true);
    CHECK(oracle::max_abs(oracle::Mat(out.vectors)) <= 1e-14);
  }
  SUBCASE("row count mismatch") {
    Embedding bad;
    bad.vectors = DenseMatrix::Zero(g.n + 1, 5);
    CHECK_THROWS_AS(enhance(g, spec, bad, true), ValidationError);
  }
}

TEST_CASE("enhance: improves clique separation of a random embedding") {
  const auto g = oracle::two_cliques(12);
  std::vector<std::int32_t> block(24, 0);
  for (int i = 12; i < 24; ++i) block[i] = 1;
  const auto spec = FilterSpec::make(0.1, 0.5, 10);

  Embedding random_emb;
  random_emb.vectors = random_dense(g.n, 8, 17);
  const double before = oracle::mean_intra_inter_cosine_gap(random_emb.vectors, block);
  const auto enhanced = enhance(g, spec, random_emb, true);
  const double after = oracle::mean_intra_inter_cosine_gap(enhanced.vectors, block);
  CHECK(after > before);
}

TEST_CASE("FilterSpec: validation") {
  CHECK_THROWS_AS(FilterSpec::make(-0.1, 0.5, 10), ValidationError);
  CHECK_THROWS_AS(FilterSpec::make(2.1, 0.5, 10), ValidationError);
  CHECK_THROWS_AS(FilterSpec::make(0.1, -0.5, 10), ValidationError);
  CHECK_THROWS_AS(FilterSpec::make(0.1, 0.5, 0), ValidationError);
}
