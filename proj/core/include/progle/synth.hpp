#pragma once

#include <cstdint>

#include "progle/graph.hpp"

namespace progle {

// Random regular graph by the permutation-pairing model: n*degree stubs are
// shuffled and paired; self-loops and duplicate edges are repaired by
// deterministic random swaps. Exactly n*degree/2 undirected edges, every
// node degree exactly `degree`. Requires n*degree even and degree < n.
SparseGraph random_regular_graph(index_t n, int degree, std::uint64_t seed);

}  // namespace progle
