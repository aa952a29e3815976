#pragma once

#include <vector>

#include "progle/proximity.hpp"
#include "progle/sparse.hpp"

namespace progle {

// Sparse factorization target: on the node-context support,
//   M(i, j) = ln p(i, j) - ln(lambda * noise[j]),
// zero (structurally absent) elsewhere.
struct ShiftedLogMatrix {
  SparseMatrix matrix;
  double lambda = 1.0;
  std::vector<double> noise;
  bool clamp_negative = false;
};

// Per-context background noise: column sums of the proximity matrix divided
// by its total mass. Sums to 1.
std::vector<double> background_noise(const ProximityMatrix& p);

// Shifted log transform restricted to the proximity support. With
// clamp_negative, strictly negative entries are removed from the pattern;
// otherwise the output pattern equals the input pattern exactly.
// Computed as ln(p) - ln(lambda) - ln(noise[j]) so that the shift identity
// M(lambda) = M(1) - ln(lambda) holds exactly, entry for entry.
ShiftedLogMatrix build_shifted_log(const ProximityMatrix& p, double lambda, bool clamp_negative);

}  // namespace progle
