#include "reoica/pipeline.hpp"

#include <string>

#include "reoica/fastica.hpp"
#include "reoica/ica.hpp"
#include "reoica/whitening.hpp"

namespace reoica {

namespace {

void validate(const RunConfig& c) {
  if (c.n < 1 || c.d < 1 || c.N < c.d) throw ConfigError("run: invalid dimensions n/N/d");
  if (c.T < 2) throw ConfigError("run: T must be at least 2");
  if (c.warmup < 0 || c.ramp < 0 || c.warmup + c.ramp >= c.T)
    throw ConfigError("run: warmup + ramp must be shorter than T");
  if (c.refresh_period < 1 || c.ortho_period < 1) throw ConfigError("run: periods must be >= 1");
  if (c.method == Method::fastica && c.reservoir.mode == Architecture::random_features)
    throw ConfigError("run: fastica takes no reservoir architecture");
}

// W is held fixed during warm-up; after that every sample takes a natural
// gradient step at the scheduled learning rate.
Vector demix(DemixingState& ica, RunTrace& trace, const Vector& z, Index t,
             const RunConfig& c) {
  if (t <= c.warmup) return ica.w * z;
  if ((ica.step_count + 1) % ica.ortho_period == 0) {
    // record det(W) right before orthogonalization to monitor sign flips
    const double det = ica.w.determinant();
    if (!trace.det_trace.empty() && (det > 0.0) != (trace.det_trace.back() > 0.0))
      trace.det_sign_flip = true;
    trace.det_trace.push_back(det);
  }
  return natgrad_step(ica, z, lr_schedule(t, c.warmup, c.ramp, c.eta));
}

[[noreturn]] void rethrow_at(const Error& e, Index t) {
  throw NumericalError(std::string(e.what()) + " (at step " + std::to_string(t) + ")");
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "reoica_base") return Method::reoica_base;
  if (name == "reoica_sqrt") return Method::reoica_sqrt;
  if (name == "reoica_rsi_guarded") return Method::reoica_rsi_guarded;
  if (name == "reoica_rsi_unguarded") return Method::reoica_rsi_unguarded;
  if (name == "vanilla") return Method::vanilla;
  if (name == "fastica") return Method::fastica;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::reoica_base: return "reoica_base";
    case Method::reoica_sqrt: return "reoica_sqrt";
    case Method::reoica_rsi_guarded: return "reoica_rsi_guarded";
    case Method::reoica_rsi_unguarded: return "reoica_rsi_unguarded";
    case Method::vanilla: return "vanilla";
    case Method::fastica: return "fastica";
  }
  return "unknown";
}

bool is_reservoir_method(Method method) {
  return method != Method::vanilla && method != Method::fastica;
}

RunConfig RunConfig::resolved() const {
  RunConfig c = *this;
  switch (method) {
    case Method::reoica_sqrt:
      c.reservoir.readout_scaling = ReadoutScaling::inv_sqrt_n;
      break;
    case Method::reoica_rsi_guarded:
      c.reservoir.readout_scaling = guarded_readout_scaling;
      c.controller.guarded = true;
      break;
    case Method::reoica_rsi_unguarded:
      c.reservoir.readout_scaling = unguarded_readout_scaling;
      c.controller.guarded = false;
      break;
    default:
      break;
  }
  validate(c);
  return c;
}

double lr_schedule(Index t, Index warmup, Index ramp, double eta_base) {
  if (t <= warmup) return 0.0;
  if (t <= warmup + ramp) {
    return eta_base * static_cast<double>(t - warmup) / static_cast<double>(ramp);
  }
  return eta_base;
}

RunTrace run_reoica(const RunConfig& config, const SourceMatrix& s, const MixedStream& x) {
  const RunConfig c = config.resolved();
  if (!is_reservoir_method(c.method)) throw ConfigError("run_reoica: not a reservoir method");
  const Index n = c.n;
  const Index T = x.data.cols();
  if (x.data.rows() != n || s.rows() != n || s.sample_count() != T)
    throw DataError("run_reoica: source/observation shapes do not match n and T");

  const ReservoirParams res =
      init_esn(n, c.N, c.d, c.reservoir, derive_seed(c.seed, "reservoir"));
  const bool adaptive =
      c.method == Method::reoica_rsi_guarded || c.method == Method::reoica_rsi_unguarded;
  RsiState rsi = make_rsi_state(c.controller, c.alpha0);
  if (!adaptive) rsi.alpha = c.alpha0;
  if (c.alpha_override) rsi.alpha = *c.alpha_override;

  WhiteningState wh = make_whitening_state(n + c.d, c.forgetting, c.loading, c.refresh_period);
  DemixingState ica = make_demixing_state(n, c.ortho_period);

  RunTrace trace;
  trace.esp_margin = res.mode == Architecture::esn ? esp_margin(res) : 1.0 - res.leak;
  trace.y = Matrix::Zero(n, T);
  Vector r = Vector::Zero(c.N);
  Vector scratch(c.N);
  Vector u(n + c.d);
  for (Index t = 1; t <= T; ++t) {
    const Vector xt = x.data.col(t - 1);
    try {
      if (res.mode == Architecture::esn) {
        esn_step_inplace(res, r, xt, scratch);
      } else {
        r = rf_features(res, xt);
      }
      u.head(n) = xt;
      u.tail(c.d).noalias() = (rsi.alpha * res.readout_scale) * (res.w_read * r);
      ema_update(wh, u);

      if (t % c.refresh_period == 0) {
        refresh_in_place(wh, n);
        const RsiDiagnostics diag = diagnostics(wh.cov, wh.basis->vectors, n);
        trace.refresh_steps.push_back(t);
        trace.alpha_trace.push_back(rsi.alpha);
        trace.diag_trace.push_back(diag);
        if (adaptive && !c.alpha_override) {
          controller_step(rsi, diag, t);
        } else {
          rsi.history.push_back({t, rsi.alpha, diag});
        }
      }
      if (wh.basis) trace.y.col(t - 1) = demix(ica, trace, whiten(*wh.basis, u), t, c);
    } catch (const Error& e) {
      rethrow_at(e, t);
    }
    if (t == c.warmup) trace.w_warmup_end = ica.w;
  }
  trace.w_final = ica.w;
  return trace;
}

RunTrace run_vanilla(const RunConfig& config, const SourceMatrix& s, const MixedStream& x) {
  RunConfig base = config;
  base.method = Method::vanilla;
  const RunConfig c = base.resolved();
  const Index n = c.n;
  const Index T = x.data.cols();
  if (x.data.rows() != n || s.rows() != n || s.sample_count() != T)
    throw DataError("run_vanilla: source/observation shapes do not match n and T");

  WhiteningState wh = make_whitening_state(n, c.forgetting, c.loading, c.refresh_period);
  DemixingState ica = make_demixing_state(n, c.ortho_period);
  RunTrace trace;
  trace.y = Matrix::Zero(n, T);
  for (Index t = 1; t <= T; ++t) {
    const Vector xt = x.data.col(t - 1);
    try {
      ema_update(wh, xt);
      if (t % c.refresh_period == 0) {
        refresh_in_place(wh, n);
        trace.refresh_steps.push_back(t);
      }
      if (wh.basis) trace.y.col(t - 1) = demix(ica, trace, whiten(*wh.basis, xt), t, c);
    } catch (const Error& e) {
      rethrow_at(e, t);
    }
    if (t == c.warmup) trace.w_warmup_end = ica.w;
  }
  trace.w_final = ica.w;
  return trace;
}

RunTrace run_method(const RunConfig& config, const SourceMatrix& s, const MixedStream& x) {
  if (config.method == Method::vanilla) return run_vanilla(config, s, x);
  if (config.method == Method::fastica) {
    (void)config.resolved();
    FastIcaConfig fc;
    fc.seed = derive_seed(config.seed, "fastica");
    FastIcaResult fr = fastica_batch(x.data, fc);
    RunTrace trace;
    trace.y = std::move(fr.y);
    trace.converged = fr.converged;
    trace.iterations = fr.iterations;
    return trace;
  }
  return run_reoica(config, s, x);
}

RunInputs make_inputs(const RunConfig& config, std::span<const SourceKind> kinds) {
  RunInputs in;
  in.sources = generate_sources(kinds, config.T, derive_seed(config.seed, "sources"));
  const Index n = in.sources.rows();
  const Matrix a = random_mixing_matrix(n, config.cond_max, derive_seed(config.seed, "mixing"));
  switch (config.regime) {
    case Regime::static_mix:
      in.mixed = mix_static(a, in.sources);
      break;
    case Regime::time_varying: {
      const Matrix delta = random_drift_matrix(a, derive_seed(config.seed, "drift"));
      in.mixed = mix_time_varying(a, delta, config.epsilon, config.drift_freq, in.sources);
      break;
    }
    case Regime::nonlinear:
      in.mixed = mix_nonlinear(a, config.gamma, config.snr_db, in.sources,
                               derive_seed(config.seed, "noise"));
      break;
  }
  return in;
}

}  // namespace reoica
