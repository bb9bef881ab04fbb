#pragma once

#include <vector>

#include "reoica/common.hpp"

namespace reoica {

/// Retention diagnostics of the top-n basis over u = [x; alpha p].
struct RsiDiagnostics {
  double ier = 0.0;        // E_p / (E_x + E_p)
  double sso = 0.0;        // ||P_p V||_F^2 / ||V||_F^2
  double rho_x = 1.0;      // E_x / tr(C_xx)
  double coherence = 0.0;  // ||C_xp||_F / sqrt(||C_xx||_F ||C_pp||_F)
  double e_x = 0.0;
  double e_p = 0.0;
  bool degenerate = false;
};

/// `cov` is the (n+d)x(n+d) covariance of u (injection scale already inside),
/// `basis` its retained eigenvectors, `n_pass` the passthrough dimension.
///
/// The coherence value is this library's operationalization of cross-block
/// coherence; it is invariant to the injection scale.
RsiDiagnostics diagnostics(const Matrix& cov, const Matrix& basis, Index n_pass);

struct ControllerConfig {
  double ier_target = 0.25;
  double rho_target = 0.95;
  double kappa = 0.3;
  double kappa_guard = 3.0;
  double alpha_min = 0.1;
  double alpha_max = 10.0;
  bool guarded = true;
};

struct RsiRecord {
  Index step = 0;
  double alpha = 1.0;  // scale in effect while the diagnostics were gathered
  RsiDiagnostics diag;
};

struct RsiState {
  double alpha = 1.0;
  ControllerConfig config;
  std::vector<RsiRecord> history;
};

RsiState make_rsi_state(const ControllerConfig& config, double alpha0 = 1.0);

/// delta = kappa (IER* - IER) - kappa_g [rho* - rho_x]_+ / rho*; the guard
/// term is dropped when the controller is unguarded.
double controller_delta(const ControllerConfig& config, const RsiDiagnostics& diag);

/// alpha <- clip(alpha e^delta, alpha_min, alpha_max); appends to history.
void controller_step(RsiState& state, const RsiDiagnostics& diag, Index step = 0);

/// lambda_max(alpha^2 C_pp) > lambda_n(C_xx), n = dim(C_xx). In the
/// block-diagonal case this certifies that a reservoir direction enters the
/// retained top-n eigenspace.
bool entry_condition(const Matrix& cxx, const Matrix& cpp, double alpha);

}  // namespace reoica
