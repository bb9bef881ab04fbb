#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "reoica/common.hpp"
#include "reoica/mixing.hpp"
#include "reoica/reservoir.hpp"
#include "reoica/rsi.hpp"
#include "reoica/signals.hpp"

namespace reoica {

enum class Method {
  reoica_base,
  reoica_sqrt,
  reoica_rsi_guarded,
  reoica_rsi_unguarded,
  vanilla,
  fastica,
};

Method parse_method(std::string_view name);
std::string_view to_string(Method method);
bool is_reservoir_method(Method method);

struct RunConfig {
  Method method = Method::reoica_base;
  Regime regime = Regime::nonlinear;
  Index T = 15000;
  std::uint64_t seed = 0;

  Index n = 3;
  Index N = 500;
  Index d = 20;
  ReservoirConfig reservoir;  // readout_scaling follows `method` in resolved()

  double forgetting = 0.995;
  double loading = 1e-6;
  Index refresh_period = 64;

  ControllerConfig controller;
  /// Readout normalization of the guarded and unguarded controller branches.
  /// The unguarded counterfactual needs 1/sqrt(N) for IER* to be reachable
  /// inside [alpha_min, alpha_max].
  ReadoutScaling guarded_readout_scaling = ReadoutScaling::inv_n;
  ReadoutScaling unguarded_readout_scaling = ReadoutScaling::inv_sqrt_n;
  double alpha0 = 1.0;
  std::optional<double> alpha_override;  // pins alpha (e.g. 0) for every step

  double eta = 5e-3;
  Index ortho_period = 50;
  Index warmup = 1000;
  Index ramp = 2000;

  // mixing protocol
  double epsilon = 0.3;
  double drift_freq = 0.5;
  double gamma = 0.8;
  double snr_db = 10.0;
  double cond_max = 5.0;

  /// Copy with method-dependent settings applied (readout scaling, controller
  /// guard). Validates the combination.
  RunConfig resolved() const;
};

struct RunTrace {
  Matrix y;  // n x T; columns before the first refresh are zero
  std::vector<Index> refresh_steps;
  std::vector<double> alpha_trace;
  std::vector<RsiDiagnostics> diag_trace;
  std::vector<double> det_trace;  // det(W) just before each orthogonalization
  bool det_sign_flip = false;
  Matrix w_warmup_end;  // demixing matrix when warm-up ends
  Matrix w_final;
  double esp_margin = 0.0;
  bool converged = true;  // batch FastICA convergence flag
  Index iterations = 0;
};

/// 0 during warm-up, linear ramp to eta_base, then eta_base. t is 1-based.
double lr_schedule(Index t, Index warmup, Index ramp, double eta_base);

/// Reservoir-expanded online ICA with RSI diagnostics and alpha control.
RunTrace run_reoica(const RunConfig& config, const SourceMatrix& s, const MixedStream& x);

/// Same backend applied directly to x (no reservoir, no injection).
RunTrace run_vanilla(const RunConfig& config, const SourceMatrix& s, const MixedStream& x);

/// Dispatches on config.method (fastica included).
RunTrace run_method(const RunConfig& config, const SourceMatrix& s, const MixedStream& x);

struct RunInputs {
  SourceMatrix sources;
  MixedStream mixed;
};

/// Seed-derived sources and mixture for one run. Every method sharing the same
/// (seed, regime, T) sees identical inputs.
RunInputs make_inputs(const RunConfig& config, std::span<const SourceKind> kinds);

}  // namespace reoica
