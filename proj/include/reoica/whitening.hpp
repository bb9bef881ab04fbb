#pragma once

#include <optional>

#include "reoica/common.hpp"

namespace reoica {

/// Top-n whitening transform frozen at a refresh.
struct WhiteningBasis {
  Matrix vectors;     // m x n, orthonormal columns
  Vector values;      // n, descending, loaded
  Matrix transform;   // n x m, D^{-1/2} V^T
  Vector mean;        // mean snapshot taken at the refresh
};

/// Exponentially weighted mean/covariance tracker.
struct WhiteningState {
  Vector mean;
  Matrix cov;
  double forgetting = 0.995;
  double loading = 1e-6;
  Index refresh_period = 64;
  Index steps_since_refresh = 0;
  std::optional<WhiteningBasis> basis;

  Index dim() const { return mean.size(); }
};

/// mu = 0, C = I.
WhiteningState make_whitening_state(Index m, double forgetting, double loading = 1e-6,
                                    Index refresh_period = 64);

/// mu_t = l mu + (1 - l) u;  C_t = l C + (1 - l)(u - mu_t)(u - mu_t)^T.
/// Throws DataError (state untouched) on non-finite input.
void ema_update(WhiteningState& state, const Vector& u);

/// Eigendecomposition of C + loading I, keeping the n largest eigenpairs.
/// Each eigenvector is flipped so its largest-magnitude entry is positive.
WhiteningBasis refresh(const WhiteningState& state, Index n);

/// refresh() then store the basis and reset the refresh counter.
void refresh_in_place(WhiteningState& state, Index n);

/// z = W_wh (u - mu_snapshot). Throws NotReadyError without a basis.
Vector whiten(const WhiteningBasis& basis, const Vector& u);
Vector whiten(const WhiteningState& state, const Vector& u);

}  // namespace reoica
