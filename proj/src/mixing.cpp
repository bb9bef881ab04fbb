#include "reoica/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace reoica {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// QR of a Gaussian matrix with the R-diagonal sign fix gives a Haar sample.
Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

void require_shape(const Matrix& a, const SourceMatrix& s, const char* who) {
  if (a.rows() != a.cols() || a.cols() != s.rows()) {
    throw DataError(std::string(who) + ": mixing matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " but there are " + std::to_string(s.rows()) +
                    " sources");
  }
}

}  // namespace

Regime parse_regime(std::string_view name) {
  if (name == "static") return Regime::static_mix;
  if (name == "time_varying") return Regime::time_varying;
  if (name == "nonlinear") return Regime::nonlinear;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::static_mix: return "static";
    case Regime::time_varying: return "time_varying";
    case Regime::nonlinear: return "nonlinear";
  }
  return "unknown";
}

Matrix random_mixing_matrix(Index n, double cond_max, std::uint64_t seed) {
  if (n < 2) throw ConfigError("random_mixing_matrix: n must be >= 2");
  if (!(cond_max > 1.0)) throw ConfigError("random_mixing_matrix: cond_max must exceed 1");

  std::mt19937_64 rng(seed);
  const Matrix u = random_orthogonal(n, rng);
  const Matrix v = random_orthogonal(n, rng);
  const double lo = std::min(1.5, cond_max);
  const double target = std::uniform_real_distribution<double>(lo, cond_max)(rng);
  const double log_target = std::log(target);

  Vector sv(n);
  sv(0) = target;
  sv(n - 1) = 1.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Index i = 1; i + 1 < n; ++i) sv(i) = std::exp(unit(rng) * log_target);
  return u * sv.asDiagonal() * v.transpose();
}

Matrix random_drift_matrix(const Matrix& a0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix delta = gaussian_matrix(a0.rows(), a0.cols(), rng);
  Eigen::JacobiSVD<Matrix> svd_a(a0);
  Eigen::JacobiSVD<Matrix> svd_d(delta);
  delta *= svd_a.singularValues()(0) / svd_d.singularValues()(0);
  return delta;
}

double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& sv = svd.singularValues();
  return sv(0) / sv(sv.size() - 1);
}

MixedStream mix_static(const Matrix& a, const SourceMatrix& s) {
  require_shape(a, s, "mix_static");
  MixedStream out;
  out.regime = Regime::static_mix;
  out.a0 = a;
  out.data = a * s.data;
  return out;
}

MixedStream mix_time_varying(const Matrix& a0, const Matrix& delta, double epsilon,
                             double freq, const SourceMatrix& s) {
  require_shape(a0, s, "mix_time_varying");
  if (delta.rows() != a0.rows() || delta.cols() != a0.cols())
    throw DataError("mix_time_varying: delta shape differs from A0");

  const Index T = s.sample_count();
  const double horizon = static_cast<double>(T);
  MixedStream out;
  out.regime = Regime::time_varying;
  out.a0 = a0;
  out.delta = delta;
  out.epsilon = epsilon;
  out.freq = freq;
  out.data.resize(a0.rows(), T);
  for (Index t = 0; t < T; ++t) {
    const double mod =
        epsilon * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) / horizon);
    out.data.col(t).noalias() = (a0 + mod * delta) * s.data.col(t);
  }
  return out;
}

MixedStream mix_nonlinear(const Matrix& a, double gamma, double snr_db,
                          const SourceMatrix& s, std::uint64_t seed) {
  require_shape(a, s, "mix_nonlinear");
  if (!(gamma > 0.0)) throw ConfigError("mix_nonlinear: gamma must be positive");

  const Matrix clean = (gamma * (a * s.data)).array().tanh().matrix();
  const double clean_power = clean.squaredNorm() / static_cast<double>(clean.size());
  const double noise_std = std::sqrt(clean_power / std::pow(10.0, snr_db / 10.0));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, noise_std);
  MixedStream out;
  out.regime = Regime::nonlinear;
  out.a0 = a;
  out.gamma = gamma;
  out.snr_db = snr_db;
  out.noise_seed = seed;
  out.data = clean;
  for (Index t = 0; t < clean.cols(); ++t)
    for (Index i = 0; i < clean.rows(); ++i) out.data(i, t) += normal(rng);
  return out;
}

double empirical_snr_db(const Matrix& clean, const Matrix& noisy) {
  return 10.0 * std::log10(clean.squaredNorm() / (noisy - clean).squaredNorm());
}

}  // namespace reoica
