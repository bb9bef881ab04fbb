#pragma once

#include "reoica/common.hpp"

namespace reoica {

struct FastIcaConfig {
  Index max_iter = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct FastIcaResult {
  Matrix y;        // n x T, whitened-space estimates (unit variance rows)
  Matrix unmixing; // n x n acting on the whitened data
  bool converged = false;
  Index iterations = 0;
};

/// Batch FastICA: centering, full PCA whitening, symmetric fixed-point
/// iteration with the logcosh contrast (g = tanh, a = 1). Non-convergence is
/// reported through `converged`, not thrown.
FastIcaResult fastica_batch(const Matrix& x, const FastIcaConfig& config = {});

}  // namespace reoica
