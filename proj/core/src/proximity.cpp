#include "progle/proximity.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "progle/errors.hpp"
#include "progle/rng.hpp"

namespace progle {

SparseMatrix dropout_adjacency(const SparseGraph& g, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta < 1.0))
    throw ValidationError("dropout ratio must lie in [0, 1), got " + std::to_string(eta));
  if (eta == 0.0) return g.adjacency;

  // One coin per undirected edge, keyed by (min, max), so both directions
  // survive or drop together and the result is independent of row order.
  std::vector<index_t> offsets(static_cast<std::size_t>(g.n) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  for (index_t i = 0; i < g.n; ++i) {
    const auto idx = g.adjacency.row_indices(i);
    const auto val = g.adjacency.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const index_t j = idx[k];
      const auto a = static_cast<std::uint64_t>(std::min<index_t>(i, j));
      const auto b = static_cast<std::uint64_t>(std::max<index_t>(i, j));
      if (edge_uniform(seed, a, b) >= eta) {
        indices.push_back(static_cast<std::int32_t>(j));
        values.push_back(val[k]);
      }
    }
    offsets[i + 1] = static_cast<index_t>(indices.size());
  }
  return SparseMatrix(g.n, g.n, std::move(offsets), std::move(indices), std::move(values));
}

SparseMatrix binarize_support(const SparseMatrix& x) {
  return x.map_values([](double) { return 1.0; });
}

namespace {

// Row-wise support of product: row i of out = union of b's rows over the
// columns of a's row i. Values are all 1 (a support indicator).
SparseMatrix support_product(const SparseMatrix& a, const SparseMatrix& b) {
  const index_t n = a.rows();
  std::vector<index_t> offsets(static_cast<std::size_t>(n) + 1, 0);

  std::vector<std::int32_t> stamp(static_cast<std::size_t>(b.cols()), -1);
  std::vector<std::vector<std::int32_t>> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 64) firstprivate(stamp)
  for (index_t i = 0; i < n; ++i) {
    auto& out = rows[i];
    const auto mark = static_cast<std::int32_t>(i & 0x7fffffff);
    for (const auto k : a.row_indices(i)) {
      for (const auto j : b.row_indices(k)) {
        if (stamp[j] != mark) {
          stamp[j] = mark;
          out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

  std::size_t total = 0;
  for (index_t i = 0; i < n; ++i) total += rows[i].size();
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(total);
  values.reserve(total);
  for (index_t i = 0; i < n; ++i) {
    indices.insert(indices.end(), rows[i].begin(), rows[i].end());
    values.insert(values.end(), rows[i].size(), 1.0);
    offsets[i + 1] = static_cast<index_t>(indices.size());
  }
  return SparseMatrix(n, b.cols(), std::move(offsets), std::move(indices), std::move(values));
}

// The stamp trick above reuses one workspace per thread; rows can collide on
// the stamp value across iterations of the same thread only if the same row
// index repeats, which it does not.

// Exact values of (P^power) restricted to the support of `mask`.
// Per row: expand P^{power-1} e_r into a scratch row (Gustavson), then gather
// each masked target entry through the corresponding column of P. Only
// masked entries are written to the output; scratch is O(n) per thread.
SparseMatrix masked_transition_power(const SparseMatrix& p, const SparseGraph& g, int power,
                                     const SparseMatrix& mask) {
  const index_t n = p.rows();
  std::vector<index_t> offsets(mask.offsets().begin(), mask.offsets().end());
  std::vector<std::int32_t> indices(mask.indices().begin(), mask.indices().end());
  std::vector<double> values(indices.size(), 0.0);

  std::vector<double> spa(static_cast<std::size_t>(n), 0.0);
  std::vector<double> spa_next(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int32_t> touched, touched_next;
#pragma omp parallel for schedule(dynamic, 16) firstprivate(spa, spa_next) \
    private(touched, touched_next)
  for (index_t r = 0; r < n; ++r) {
    if (offsets[r] == offsets[r + 1]) continue;

    // spa <- row r of P^{power-1}
    touched.clear();
    {
      const auto idx = p.row_indices(r);
      const auto val = p.row_values(r);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        spa[idx[k]] = val[k];
        touched.push_back(idx[k]);
      }
    }
    for (int step = 2; step < power; ++step) {
      touched_next.clear();
      for (const auto k : touched) {
        const double w = spa[k];
        const auto idx = p.row_indices(k);
        const auto val = p.row_values(k);
        for (std::size_t t = 0; t < idx.size(); ++t) {
          if (spa_next[idx[t]] == 0.0) touched_next.push_back(idx[t]);
          spa_next[idx[t]] += w * val[t];
        }
      }
      for (const auto k : touched) spa[k] = 0.0;
      std::swap(spa, spa_next);
      std::swap(touched, touched_next);
    }

    // out(r, c) = sum_k spa[k] * P(k, c), gathered through column c of P.
    // A is symmetric, so column c of P is reachable from row c of A:
    // P(k, c) = A(c, k) / degree[k].
    for (index_t q = offsets[r]; q < offsets[r + 1]; ++q) {
      const index_t c = indices[q];
      const auto idx = g.adjacency.row_indices(c);
      const auto val = g.adjacency.row_values(c);
      double acc = 0.0;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        const index_t k = idx[t];
        if (spa[k] != 0.0) acc += spa[k] * (val[t] / g.degree[k]);
      }
      values[q] = acc;
    }

    for (const auto k : touched) spa[k] = 0.0;
  }

  return SparseMatrix(n, n, std::move(offsets), std::move(indices), std::move(values));
}

}  // namespace

ProximityMatrix build_proximity(const SparseGraph& g, int order, double eta, std::uint64_t seed) {
  if (order < 1) throw ValidationError("proximity order must be >= 1");
  if (order > 3)
    std::fprintf(stderr, "warning: proximity order %d exceeds the intended range {1,2,3}\n",
                 order);
  if (!(eta >= 0.0 && eta < 1.0))
    throw ValidationError("dropout ratio must lie in [0, 1), got " + std::to_string(eta));

  const SparseMatrix p = transition_matrix(g);

  // Term 1: the mask is support(A) = support(P), so it is exactly P.
  SparseMatrix sum = p;
  SparseMatrix mask = binarize_support(g.adjacency);
  for (int i = 2; i <= order; ++i) {
    const SparseMatrix dropped = dropout_adjacency(g, eta, mix_seed(seed, i - 1));
    mask = support_product(mask, dropped);
    sum = add(sum, masked_transition_power(p, g, i, mask));
  }

  // Row-normalize positive rows to sum 1.
  auto sums = sum.row_sums();
  std::vector<index_t> offsets(sum.offsets().begin(), sum.offsets().end());
  std::vector<std::int32_t> indices(sum.indices().begin(), sum.indices().end());
  std::vector<double> values(sum.values().begin(), sum.values().end());
  for (index_t i = 0; i < sum.rows(); ++i) {
    if (sums[i] <= 0.0) continue;
    for (index_t k = offsets[i]; k < offsets[i + 1]; ++k) values[k] /= sums[i];
  }

  ProximityMatrix out;
  out.matrix = SparseMatrix(sum.rows(), sum.cols(), std::move(offsets), std::move(indices),
                            std::move(values));
  out.order = order;
  out.dropout = eta;
  out.seed = seed;
  return out;
}

}  // namespace progle
