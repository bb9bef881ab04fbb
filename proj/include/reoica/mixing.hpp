#pragma once

#include <optional>
#include <string_view>

#include "reoica/common.hpp"
#include "reoica/signals.hpp"

namespace reoica {

enum class Regime { static_mix, time_varying, nonlinear };

Regime parse_regime(std::string_view name);
std::string_view to_string(Regime regime);

/// Observations plus the parameters that produced them.
struct MixedStream {
  Matrix data;  // n x T
  Regime regime = Regime::static_mix;
  Matrix a0;
  std::optional<Matrix> delta;
  double epsilon = 0.0;
  double freq = 0.0;
  double gamma = 0.0;
  std::optional<double> snr_db;
  std::uint64_t noise_seed = 0;
};

/// Random n x n matrix with 2-norm condition number <= cond_max.
///
/// Built as U diag(s) V^T with Haar-distributed U, V. The realized condition
/// number is drawn uniformly from [min(1.5, cond_max), cond_max] and the
/// remaining singular values are log-uniform in between.
Matrix random_mixing_matrix(Index n, double cond_max, std::uint64_t seed);

/// Gaussian drift direction rescaled so that ||delta||_2 == ||a0||_2.
Matrix random_drift_matrix(const Matrix& a0, std::uint64_t seed);

double condition_number(const Matrix& a);

MixedStream mix_static(const Matrix& a, const SourceMatrix& s);

/// x_t = (A0 + eps sin(2 pi f t / T) Delta) s_t, t and T in samples.
MixedStream mix_time_varying(const Matrix& a0, const Matrix& delta, double epsilon,
                             double freq, const SourceMatrix& s);

/// x_t = tanh(gamma A s_t) + eta_t at the requested SNR, where the noise
/// variance is calibrated on the realized clean signal.
MixedStream mix_nonlinear(const Matrix& a, double gamma, double snr_db,
                          const SourceMatrix& s, std::uint64_t seed);

/// 10 log10(clean power / noise power), both measured over all channels.
double empirical_snr_db(const Matrix& clean, const Matrix& noisy);

}  // namespace reoica
