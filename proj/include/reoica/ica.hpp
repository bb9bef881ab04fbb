#pragma once

#include "reoica/common.hpp"

namespace reoica {

using Nonlinearity = double (*)(double);

struct DemixingState {
  Matrix w;
  Index ortho_period = 50;
  Index step_count = 0;
  Nonlinearity phi = nullptr;  // nullptr means tanh
};

DemixingState make_demixing_state(Index n, Index ortho_period = 50);

/// y = W z;  W <- W + eta (I - phi(y) y^T) W.  Every `ortho_period` steps W is
/// replaced by its symmetric orthogonalization. Returns y.
Vector natgrad_step(DemixingState& state, const Vector& z, double eta);

/// (W W^T)^{-1/2} W via the eigendecomposition of W W^T.
/// Throws NumericalError when W is (numerically) rank deficient.
Matrix symmetric_orthogonalize(const Matrix& w);

}  // namespace reoica
