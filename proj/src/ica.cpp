#include "reoica/ica.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace reoica {

DemixingState make_demixing_state(Index n, Index ortho_period) {
  if (ortho_period < 1) throw ConfigError("ica: orthogonalization period must be positive");
  DemixingState s;
  s.w = Matrix::Identity(n, n);
  s.ortho_period = ortho_period;
  return s;
}

Vector natgrad_step(DemixingState& state, const Vector& z, double eta) {
  const Vector y = state.w * z;
  if (!y.allFinite()) throw NumericalError("natgrad_step: non-finite demixed output");

  const Index n = y.size();
  Vector g(n);
  for (Index i = 0; i < n; ++i) g(i) = state.phi ? state.phi(y(i)) : std::tanh(y(i));
  Matrix bracket = -g * y.transpose();
  bracket.diagonal().array() += 1.0;
  state.w += eta * (bracket * state.w);

  ++state.step_count;
  if (state.step_count % state.ortho_period == 0) state.w = symmetric_orthogonalize(state.w);
  return y;
}

Matrix symmetric_orthogonalize(const Matrix& w) {
  constexpr double kFloor = 1e-12;
  const Matrix gram = w * w.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric_orthogonalize: eigensolver failed");
  const Vector& ev = es.eigenvalues();
  if (!(ev(0) > kFloor * ev(ev.size() - 1)))
    throw NumericalError("symmetric_orthogonalize: rank-deficient matrix");
  const Vector inv_sqrt = ev.cwiseMax(kFloor).cwiseSqrt().cwiseInverse();
  Matrix o = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose() * w;
  // Newton-Schulz polish: same polar factor, rounding error of an ill-conditioned
  // Gram matrix removed
  const Matrix eye = Matrix::Identity(o.rows(), o.rows());
  for (int k = 0; k < 2; ++k) o += 0.5 * (eye - o * o.transpose()) * o;
  return o;
}

}  // namespace reoica
