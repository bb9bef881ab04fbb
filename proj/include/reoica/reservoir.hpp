#pragma once

#include <string_view>

#include <Eigen/SparseCore>

#include "reoica/common.hpp"

namespace reoica {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Architecture { esn, random_features };
enum class ReadoutScaling { inv_n, inv_sqrt_n };

Architecture parse_architecture(std::string_view name);
std::string_view to_string(Architecture arch);

struct ReservoirConfig {
  double density = 0.05;
  double spectral_radius = 0.95;
  double leak = 0.1;
  double input_scale = 0.1;
  double bias_scale = 0.1;
  ReadoutScaling readout_scaling = ReadoutScaling::inv_n;
  Architecture mode = Architecture::esn;
};

/// Fixed random encoder weights. Immutable after init_esn().
struct ReservoirParams {
  Matrix w_in;          // N x n
  SparseMatrix w_res;   // N x N
  Vector bias;          // N
  Matrix w_read;        // d x N
  double readout_scale = 1.0;  // c_N
  double leak = 1.0;
  double rho_target = 0.0;
  double input_scale = 1.0;
  Architecture mode = Architecture::esn;

  Index input_dim() const { return w_in.cols(); }
  Index size() const { return w_in.rows(); }
  Index readout_dim() const { return w_read.rows(); }
};

struct ReservoirState {
  Vector r;
};

ReservoirParams init_esn(Index n, Index N, Index d, const ReservoirConfig& config,
                         std::uint64_t seed);

ReservoirState zero_state(const ReservoirParams& params);

/// r' = (1 - a) r + a tanh(W_in x + W_res r + b)
ReservoirState esn_step(const ReservoirParams& params, const ReservoirState& state,
                        const Vector& x);

/// In-place variant used by the pipeline; `scratch` avoids per-step allocation.
void esn_step_inplace(const ReservoirParams& params, Vector& r, const Vector& x,
                      Vector& scratch);

/// tanh(W_in x + b). Only valid for random_features mode.
Vector rf_features(const ReservoirParams& params, const Vector& x);

/// p = c_N W_read r
Vector readout(const ReservoirParams& params, const Vector& r);

/// Largest |eigenvalue| by block subspace iteration with Rayleigh-Ritz
/// extraction (handles complex-conjugate dominant pairs). Falls back to a
/// dense eigensolver if the iteration does not settle.
double spectral_radius(const SparseMatrix& w, double rel_tol = 1e-9,
                       std::uint64_t seed = 0x5eed);

/// Largest singular value by power iteration on W^T W.
double spectral_norm(const SparseMatrix& w, double rel_tol = 1e-12);

/// (1 - a) + a ||W_res||_2 with L = 1 for tanh. Diagnostic only: values >= 1
/// just mean the sufficient contraction condition is not certified.
double esp_margin(const ReservoirParams& params);

}  // namespace reoica
