#include "reoica/fastica.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "reoica/ica.hpp"

namespace reoica {

FastIcaResult fastica_batch(const Matrix& x, const FastIcaConfig& config) {
  if (config.max_iter < 1) throw ConfigError("fastica: max_iter must be >= 1");
  if (!(config.tol > 0.0)) throw ConfigError("fastica: tol must be positive");
  if (!x.allFinite()) throw DataError("fastica: non-finite input");
  const Index n = x.rows();
  const Index T = x.cols();
  if (T <= n) throw DataError("fastica: need more samples than channels");

  const Matrix centered = x.colwise() - x.rowwise().mean();
  const Matrix cov = centered * centered.transpose() / static_cast<double>(T);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success || !(es.eigenvalues()(0) > 0.0))
    throw NumericalError("fastica: singular data covariance");
  const Matrix whitener = es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
  const Matrix xw = whitener * centered;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) w(i, j) = normal(rng);
  w = symmetric_orthogonalize(w);

  FastIcaResult out;
  const double inv_T = 1.0 / static_cast<double>(T);
  for (Index iter = 1; iter <= config.max_iter; ++iter) {
    const Matrix g = (w * xw).array().tanh().matrix();
    const Vector g_prime_mean = (1.0 - g.array().square()).rowwise().mean();
    Matrix next = g * xw.transpose() * inv_T - g_prime_mean.asDiagonal() * w;
    next = symmetric_orthogonalize(next);
    const double change =
        ((next * w.transpose()).diagonal().cwiseAbs().array() - 1.0).abs().maxCoeff();
    w = next;
    out.iterations = iter;
    if (change < config.tol) {
      out.converged = true;
      break;
    }
  }
  out.unmixing = w;
  out.y = w * xw;
  return out;
}

}  // namespace reoica
