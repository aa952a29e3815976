#include "progle/pipeline.hpp"

#include <chrono>
#include <string>

#include "progle/errors.hpp"
#include "progle/pmi.hpp"
#include "progle/proximity.hpp"
#include "progle/rng.hpp"
#include "progle/spectral.hpp"
#include "progle/svd.hpp"

namespace progle {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

EmbedResult embed_graph(const SparseGraph& g, const RunConfig& config) {
  if (config.dim < 1) throw ValidationError("embedding dimension must be >= 1");
  if (config.dim >= g.n)
    throw ValidationError("embedding dimension " + std::to_string(config.dim) +
                          " must be < node count " + std::to_string(g.n));

  EmbedResult result;
  result.stats.nodes = g.n;
  result.stats.undirected_edges = g.undirected_edge_count();
  const auto t_total = Clock::now();

  auto t = Clock::now();
  const ProximityMatrix proximity =
      build_proximity(g, config.order, config.dropout, mix_seed(config.seed, 0x70));
  result.timings.proximity_ms = ms_since(t);
  result.stats.proximity_nnz = proximity.nnz();

  t = Clock::now();
  const ShiftedLogMatrix shifted =
      build_shifted_log(proximity, config.lambda, config.clamp_negative);
  result.timings.shifted_log_ms = ms_since(t);
  result.stats.shifted_log_nnz = shifted.matrix.nnz();

  t = Clock::now();
  const SvdResult svd =
      truncated_svd(shifted.matrix, config.dim, config.svd_tol, mix_seed(config.seed, 0x5d));
  result.raw = scale_embedding(svd.u, svd.singular_values);
  result.raw.validate();
  result.timings.factorize_ms = ms_since(t);

  t = Clock::now();
  const FilterSpec filter = FilterSpec::make(config.mu, config.theta, config.cheb_k);
  result.final = propagate(g, filter, result.raw, !config.no_rescale);
  result.timings.propagate_ms = ms_since(t);

  result.timings.total_ms = ms_since(t_total);
  return result;
}

}  // namespace progle
