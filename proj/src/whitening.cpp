#include "reoica/whitening.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace reoica {

WhiteningState make_whitening_state(Index m, double forgetting, double loading,
                                    Index refresh_period) {
  if (m < 1) throw ConfigError("whitening: dimension must be positive");
  if (!(forgetting >= 0.0 && forgetting < 1.0))
    throw ConfigError("whitening: forgetting factor must lie in [0, 1)");
  if (refresh_period < 1) throw ConfigError("whitening: refresh period must be positive");
  WhiteningState s;
  s.mean = Vector::Zero(m);
  s.cov = Matrix::Identity(m, m);
  s.forgetting = forgetting;
  s.loading = loading;
  s.refresh_period = refresh_period;
  return s;
}

void ema_update(WhiteningState& state, const Vector& u) {
  if (u.size() != state.dim())
    throw DataError("ema_update: expected dimension " + std::to_string(state.dim()) + ", got " +
                    std::to_string(u.size()));
  if (!u.allFinite()) throw DataError("ema_update: non-finite input sample");

  const double lambda = state.forgetting;
  state.mean = lambda * state.mean + (1.0 - lambda) * u;
  const Vector residual = u - state.mean;
  state.cov *= lambda;
  // rank-1 update on the lower triangle, mirrored so C stays exactly symmetric
  state.cov.selfadjointView<Eigen::Lower>().rankUpdate(residual, 1.0 - lambda);
  state.cov.triangularView<Eigen::StrictlyUpper>() = state.cov.transpose();
  ++state.steps_since_refresh;
}

WhiteningBasis refresh(const WhiteningState& state, Index n) {
  const Index m = state.dim();
  if (n < 1 || n > m) throw ConfigError("refresh: retained dimension must lie in [1, m]");

  Matrix loaded = state.cov;
  loaded.diagonal().array() += state.loading;
  Eigen::SelfAdjointEigenSolver<Matrix> es(loaded);
  if (es.info() != Eigen::Success) throw NumericalError("refresh: eigensolver failed");

  // eigenvalues come back ascending
  WhiteningBasis b;
  b.vectors.resize(m, n);
  b.values.resize(n);
  for (Index k = 0; k < n; ++k) {
    const Index src = m - 1 - k;
    Vector v = es.eigenvectors().col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    b.vectors.col(k) = v;
    b.values(k) = es.eigenvalues()(src);
  }
  if (!(b.values(n - 1) > 0.0) || !b.values.allFinite())
    throw NumericalError("refresh: non-positive retained eigenvalue");
  b.transform = b.values.cwiseSqrt().cwiseInverse().asDiagonal() * b.vectors.transpose();
  b.mean = state.mean;
  return b;
}

void refresh_in_place(WhiteningState& state, Index n) {
  state.basis = refresh(state, n);
  state.steps_since_refresh = 0;
}

Vector whiten(const WhiteningBasis& basis, const Vector& u) {
  return basis.transform * (u - basis.mean);
}

Vector whiten(const WhiteningState& state, const Vector& u) {
  if (!state.basis) throw NotReadyError("whiten: no whitening basis yet");
  return whiten(*state.basis, u);
}

}  // namespace reoica
