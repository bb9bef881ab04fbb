#include "reoica/rsi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace reoica {

RsiDiagnostics diagnostics(const Matrix& cov, const Matrix& basis, Index n_pass) {
  const Index m = cov.rows();
  if (cov.cols() != m || basis.rows() != m || n_pass < 0 || n_pass > m)
    throw DataError("diagnostics: inconsistent covariance/basis/passthrough shapes");
  const Index d = m - n_pass;

  const auto vx = basis.topRows(n_pass);
  const auto vp = basis.bottomRows(d);
  const auto cxx = cov.topLeftCorner(n_pass, n_pass);
  const auto cpp = cov.bottomRightCorner(d, d);
  const auto cxp = cov.topRightCorner(n_pass, d);

  RsiDiagnostics out;
  out.e_x = (vx.transpose() * cxx * vx).trace();
  out.e_p = d > 0 ? (vp.transpose() * cpp * vp).trace() : 0.0;
  const double total = out.e_x + out.e_p;
  if (total > 0.0) {
    out.ier = out.e_p / total;
  } else {
    out.ier = 0.0;
    out.degenerate = true;
  }
  const double basis_mass = basis.squaredNorm();
  out.sso = basis_mass > 0.0 && d > 0 ? vp.squaredNorm() / basis_mass : 0.0;

  const double trace_xx = cxx.trace();
  if (trace_xx > 0.0) {
    out.rho_x = out.e_x / trace_xx;
  } else {
    out.rho_x = 0.0;
    out.degenerate = true;
  }
  const double block_scale = std::sqrt(cxx.norm() * (d > 0 ? cpp.norm() : 0.0));
  out.coherence = block_scale > 0.0 ? cxp.norm() / block_scale : 0.0;
  return out;
}

RsiState make_rsi_state(const ControllerConfig& config, double alpha0) {
  if (!(config.alpha_min > 0.0 && config.alpha_min <= config.alpha_max))
    throw ConfigError("rsi: require 0 < alpha_min <= alpha_max");
  if (!(config.rho_target > 0.0)) throw ConfigError("rsi: rho target must be positive");
  RsiState s;
  s.config = config;
  s.alpha = std::clamp(alpha0, config.alpha_min, config.alpha_max);
  return s;
}

double controller_delta(const ControllerConfig& config, const RsiDiagnostics& diag) {
  double delta = config.kappa * (config.ier_target - diag.ier);
  if (config.guarded) {
    delta -= config.kappa_guard * std::max(config.rho_target - diag.rho_x, 0.0) /
             config.rho_target;
  }
  return delta;
}

void controller_step(RsiState& state, const RsiDiagnostics& diag, Index step) {
  state.history.push_back({step, state.alpha, diag});
  const double delta = controller_delta(state.config, diag);
  state.alpha =
      std::clamp(state.alpha * std::exp(delta), state.config.alpha_min, state.config.alpha_max);
}

bool entry_condition(const Matrix& cxx, const Matrix& cpp, double alpha) {
  if (cxx.rows() == 0 || cpp.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> ex(cxx, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> ep(cpp, Eigen::EigenvaluesOnly);
  // ascending order: the n-th largest of an n x n block is its smallest
  const double lambda_n = ex.eigenvalues()(0);
  const double lambda_max = alpha * alpha * ep.eigenvalues()(ep.eigenvalues().size() - 1);
  return lambda_max > lambda_n;
}

}  // namespace reoica
