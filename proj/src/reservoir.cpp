#include "reoica/reservoir.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace reoica {

namespace {

Matrix orthonormalize(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
}

double dense_spectral_radius(const SparseMatrix& w) {
  Eigen::EigenSolver<Matrix> es(Matrix(w), /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Architecture parse_architecture(std::string_view name) {
  if (name == "esn") return Architecture::esn;
  if (name == "random_features" || name == "rf") return Architecture::random_features;
  throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

std::string_view to_string(Architecture arch) {
  return arch == Architecture::esn ? "esn" : "random_features";
}

ReservoirParams init_esn(Index n, Index N, Index d, const ReservoirConfig& config,
                         std::uint64_t seed) {
  if (n < 1 || d < 1) throw ConfigError("init_esn: dimensions must be positive");
  if (N < d) throw ConfigError("init_esn: reservoir size N must be >= readout dim d");
  if (!(config.leak > 0.0 && config.leak <= 1.0))
    throw ConfigError("init_esn: leak rate must lie in (0, 1]");
  if (config.spectral_radius < 0.0) throw ConfigError("init_esn: negative spectral radius");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution keep(config.density);

  ReservoirParams p;
  p.mode = config.mode;
  p.leak = config.leak;
  p.rho_target = config.spectral_radius;
  p.input_scale = config.input_scale;
  p.readout_scale = config.readout_scaling == ReadoutScaling::inv_n
                        ? 1.0 / static_cast<double>(N)
                        : 1.0 / std::sqrt(static_cast<double>(N));

  p.w_in.resize(N, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < N; ++i) p.w_in(i, j) = config.input_scale * unit(rng);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(config.density * static_cast<double>(N * N) * 1.1));
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j)
      if (keep(rng)) entries.emplace_back(i, j, normal(rng));
  p.w_res.resize(N, N);
  p.w_res.setFromTriplets(entries.begin(), entries.end());
  if (config.mode == Architecture::esn && p.w_res.nonZeros() > 0) {
    if (config.spectral_radius == 0.0) {
      p.w_res.setZero();
    } else {
      const double radius = spectral_radius(p.w_res, 1e-9, derive_seed(seed, "power"));
      if (radius > 0.0) p.w_res *= config.spectral_radius / radius;
    }
  } else if (config.mode == Architecture::random_features) {
    p.w_res.setZero();
  }
  p.w_res.makeCompressed();

  p.bias.resize(N);
  for (Index i = 0; i < N; ++i) p.bias(i) = config.bias_scale * unit(rng);

  p.w_read.resize(d, N);
  for (Index j = 0; j < N; ++j)
    for (Index i = 0; i < d; ++i) p.w_read(i, j) = normal(rng);
  return p;
}

ReservoirState zero_state(const ReservoirParams& params) {
  return ReservoirState{Vector::Zero(params.size())};
}

ReservoirState esn_step(const ReservoirParams& params, const ReservoirState& state,
                        const Vector& x) {
  ReservoirState next{state.r};
  Vector scratch(params.size());
  esn_step_inplace(params, next.r, x, scratch);
  return next;
}

void esn_step_inplace(const ReservoirParams& params, Vector& r, const Vector& x,
                      Vector& scratch) {
  scratch.noalias() = params.w_in * x;
  scratch.noalias() += params.w_res * r;
  scratch += params.bias;
  r = (1.0 - params.leak) * r + params.leak * scratch.array().tanh().matrix();
}

Vector rf_features(const ReservoirParams& params, const Vector& x) {
  if (params.mode != Architecture::random_features)
    throw ModeError("rf_features: reservoir was built in esn mode");
  return (params.w_in * x + params.bias).array().tanh().matrix();
}

Vector readout(const ReservoirParams& params, const Vector& r) {
  return params.readout_scale * (params.w_read * r);
}

double spectral_radius(const SparseMatrix& w, double rel_tol, std::uint64_t seed) {
  const Index N = w.rows();
  if (N == 0 || w.nonZeros() == 0) return 0.0;
  if (N <= 16) return dense_spectral_radius(w);

  const Index block = std::min<Index>(12, N);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix q(N, block);
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < N; ++i) q(i, j) = normal(rng);
  q = orthonormalize(q);

  double previous = -1.0;
  int settled = 0;
  constexpr int kMaxIter = 20000;
  Matrix z(N, block);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    z.noalias() = w * q;
    const Matrix h = q.transpose() * z;
    Eigen::EigenSolver<Matrix> es(h, false);
    const double estimate = es.eigenvalues().cwiseAbs().maxCoeff();
    if (estimate == 0.0) return 0.0;
    settled = std::abs(estimate - previous) <= rel_tol * estimate ? settled + 1 : 0;
    if (settled >= 5) return estimate;
    previous = estimate;
    q = orthonormalize(z);
  }
  return dense_spectral_radius(w);
}

double spectral_norm(const SparseMatrix& w, double rel_tol) {
  const Index N = w.cols();
  if (N == 0 || w.nonZeros() == 0) return 0.0;
  std::mt19937_64 rng(0x2a0f);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(N);
  for (Index i = 0; i < N; ++i) v(i) = normal(rng);
  v.normalize();
  double previous = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    const Vector wv = w * v;
    const Vector next = w.transpose() * wv;
    const double lambda = v.dot(next);  // Rayleigh quotient of W^T W
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    v = next / norm;
    if (std::abs(lambda - previous) <= rel_tol * lambda) return std::sqrt(lambda);
    previous = lambda;
  }
  return std::sqrt(previous);
}

double esp_margin(const ReservoirParams& params) {
  return (1.0 - params.leak) + params.leak * spectral_norm(params.w_res);
}

}  // namespace reoica
