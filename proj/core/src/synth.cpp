#include "progle/synth.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "progle/errors.hpp"
#include "progle/rng.hpp"

namespace progle {

SparseGraph random_regular_graph(index_t n, int degree, std::uint64_t seed) {
  if (n < 2) throw ValidationError("regular graph needs at least 2 nodes");
  if (degree < 1 || degree >= n)
    throw ValidationError("regular graph degree must lie in [1, n), got " +
                          std::to_string(degree));
  if ((n * degree) % 2 != 0)
    throw ValidationError("regular graph infeasible: n * degree is odd");

  const index_t n_edges = n * degree / 2;
  auto key = [n](index_t a, index_t b) {
    return static_cast<std::uint64_t>(std::min(a, b)) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(std::max(a, b));
  };

  for (int attempt = 0; attempt < 20; ++attempt) {
    CounterRng rng = CounterRng(seed).derive(static_cast<std::uint64_t>(attempt));

    std::vector<index_t> stubs(static_cast<std::size_t>(n) * degree);
    for (index_t i = 0; i < n; ++i)
      for (int t = 0; t < degree; ++t) stubs[static_cast<std::size_t>(i) * degree + t] = i;
    for (std::size_t i = stubs.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_below(i + 1));
      std::swap(stubs[i], stubs[j]);
    }

    std::vector<index_t> u(n_edges), v(n_edges);
    std::unordered_set<std::uint64_t> edges;
    edges.reserve(static_cast<std::size_t>(n_edges) * 2);
    std::vector<char> registered(static_cast<std::size_t>(n_edges), 0);
    std::vector<index_t> bad;
    for (index_t p = 0; p < n_edges; ++p) {
      u[p] = stubs[2 * p];
      v[p] = stubs[2 * p + 1];
      if (u[p] != v[p] && edges.insert(key(u[p], v[p])).second)
        registered[p] = 1;
      else
        bad.push_back(p);
    }

    // Repair conflicts by swapping endpoints with random registered pairs.
    const std::int64_t proposal_cap = 1000 + 200 * static_cast<std::int64_t>(bad.size());
    std::int64_t proposals = 0;
    while (!bad.empty() && proposals < proposal_cap) {
      ++proposals;
      const index_t p = bad.back();
      const auto q = static_cast<index_t>(rng.uniform_below(static_cast<std::uint64_t>(n_edges)));
      if (q == p || !registered[q]) continue;
      const index_t a = u[p], b = v[p], c = u[q], d = v[q];
      // (a,b),(c,d) -> (a,d),(c,b)
      if (a == d || c == b) continue;
      const auto k1 = key(a, d), k2 = key(c, b);
      if (k1 == k2 || edges.contains(k1) || edges.contains(k2)) continue;
      edges.erase(key(c, d));
      edges.insert(k1);
      edges.insert(k2);
      v[p] = d;
      v[q] = b;
      registered[p] = 1;
      bad.pop_back();
    }
    if (!bad.empty()) continue;  // reshuffle and try again

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(n_edges) * 2);
    for (index_t p = 0; p < n_edges; ++p) {
      triplets.push_back({u[p], v[p], 1.0});
      triplets.push_back({v[p], u[p], 1.0});
    }
    return SparseGraph::from_adjacency(SparseMatrix::from_triplets(n, n, std::move(triplets)));
  }
  throw ValidationError("could not realize a simple regular graph with n=" + std::to_string(n) +
                        ", degree=" + std::to_string(degree));
}

}  // namespace progle
