#include "progle/pmi.hpp"

#include <cmath>
#include <string>

#include "progle/errors.hpp"

namespace progle {

std::vector<double> background_noise(const ProximityMatrix& p) {
  const auto& m = p.matrix;
  std::vector<double> noise(static_cast<std::size_t>(m.cols()), 0.0);
  double total = 0.0;
  const auto idx = m.indices();
  const auto val = m.values();
  for (std::size_t k = 0; k < val.size(); ++k) {
    noise[idx[k]] += val[k];
    total += val[k];
  }
  if (!(total > 0.0)) throw ValidationError("background noise: proximity matrix has no mass");
  for (auto& x : noise) x /= total;
  return noise;
}

ShiftedLogMatrix build_shifted_log(const ProximityMatrix& p, double lambda, bool clamp_negative) {
  if (!(lambda > 0.0))
    throw ValidationError("negative-noise ratio lambda must be > 0, got " +
                          std::to_string(lambda));
  ShiftedLogMatrix out;
  out.lambda = lambda;
  out.clamp_negative = clamp_negative;
  out.noise = background_noise(p);

  const auto& src = p.matrix;
  const double log_lambda = std::log(lambda);
  std::vector<double> log_noise(out.noise.size(), 0.0);
  for (std::size_t j = 0; j < out.noise.size(); ++j)
    log_noise[j] = out.noise[j] > 0.0 ? std::log(out.noise[j]) : 0.0;

  std::vector<index_t> offsets(static_cast<std::size_t>(src.rows()) + 1, 0);
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  indices.reserve(src.nnz());
  values.reserve(src.nnz());
  for (index_t i = 0; i < src.rows(); ++i) {
    const auto idx = src.row_indices(i);
    const auto val = src.row_values(i);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!(val[k] > 0.0)) continue;  // explicit zeros are dropped before the log
      // noise[j] > 0 whenever column j carries any pair, which it does here.
      // Grouped so that M(lambda) == M(1) - ln(lambda) holds bit for bit.
      const double v = (std::log(val[k]) - log_noise[idx[k]]) - log_lambda;
      if (clamp_negative && v < 0.0) continue;
      indices.push_back(idx[k]);
      values.push_back(v);
    }
    offsets[i + 1] = static_cast<index_t>(indices.size());
  }
  out.matrix = SparseMatrix(src.rows(), src.cols(), std::move(offsets), std::move(indices),
                            std::move(values));
  return out;
}

}  // namespace progle
