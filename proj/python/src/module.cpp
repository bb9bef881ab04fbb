#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "reoica/experiment.hpp"
#include "reoica/fastica.hpp"
#include "reoica/ica.hpp"
#include "reoica/metrics.hpp"
#include "reoica/pipeline.hpp"
#include "reoica/rsi.hpp"

namespace py = pybind11;
using namespace reoica;

namespace {

std::vector<SourceKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<SourceKind> kinds;
  for (const auto& n : names) kinds.push_back(parse_source_kind(n));
  return kinds;
}

// Settings use the same key=value vocabulary as the runner's config files.
ExperimentSpec spec_from(const std::map<std::string, std::string>& settings) {
  ExperimentSpec spec;
  for (const auto& [k, v] : settings) apply_setting(spec, k, v);
  return spec;
}

py::dict diag_dict(const RsiDiagnostics& d) {
  py::dict out;
  out["ier"] = d.ier;
  out["sso"] = d.sso;
  out["rho_x"] = d.rho_x;
  out["coherence"] = d.coherence;
  out["e_x"] = d.e_x;
  out["e_p"] = d.e_p;
  out["degenerate"] = d.degenerate;
  return out;
}

py::dict row_dict(const SeedRow& r) {
  py::dict out;
  out["regime"] = std::string(to_string(r.regime));
  out["method"] = std::string(to_string(r.method));
  out["arch"] = std::string(to_string(r.point.arch));
  out["N"] = r.point.N;
  out["eps"] = r.point.eps;
  out["seed"] = r.seed;
  out["si_sdr_sc_mean"] = r.si_sdr_sc_mean;
  out["per_source"] = r.per_source;
  out["mean_abs_corr"] = r.mean_abs_corr;
  out["ier"] = r.ier;
  out["sso"] = r.sso;
  out["rho_x"] = r.rho_x;
  out["coherence"] = r.coherence;
  return out;
}

py::dict aggregate_dict(const AggregateRow& a) {
  py::dict out;
  out["regime"] = std::string(to_string(a.regime));
  out["method"] = std::string(to_string(a.method));
  out["arch"] = std::string(to_string(a.point.arch));
  out["N"] = a.point.N;
  out["eps"] = a.point.eps;
  out["seeds"] = a.seeds;
  out["si_sdr_sc_mean"] = a.si_sdr_mean;
  out["si_sdr_sc_sem"] = a.si_sdr_sem;
  out["corr_mean"] = a.corr_mean;
  out["corr_sem"] = a.corr_sem;
  out["wins"] = a.wins ? py::object(py::int_(*a.wins)) : py::object(py::none());
  out["compared"] = a.compared;
  out["reference"] = a.reference;
  out["ier"] = a.ier;
  out["sso"] = a.sso;
  out["rho_x"] = a.rho_x;
  out["coherence"] = a.coherence;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reservoir-expanded online ICA: C++ core bindings";

  auto base = py::register_exception<Error>(m, "ReoicaError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<NotReadyError>(m, "NotReadyError", base.ptr());
  py::register_exception<ModeError>(m, "ModeError", base.ptr());
  py::register_exception<MetricError>(m, "MetricError", base.ptr());
  py::register_exception<AggregationError>(m, "AggregationError", base.ptr());

  m.def(
      "generate_sources",
      [](const std::vector<std::string>& kinds, Index T, std::uint64_t seed) {
        return generate_sources(parse_kinds(kinds), T, seed).data;
      },
      py::arg("kinds"), py::arg("T"), py::arg("seed"),
      "Standardized sources, one row per kind.");

  m.def("random_mixing_matrix", &random_mixing_matrix, py::arg("n"), py::arg("cond_max"),
        py::arg("seed"));

  m.def(
      "make_inputs",
      [](const std::map<std::string, std::string>& settings, const std::string& regime,
         std::uint64_t seed_index) {
        ExperimentSpec spec = spec_from(settings);
        RunConfig c = spec.base;
        c.regime = parse_regime(regime);
        c.seed = run_seed(spec.master_seed, seed_index);
        const RunInputs in = make_inputs(c, spec.sources);
        return py::make_tuple(in.sources.data, in.mixed.data);
      },
      py::arg("settings") = std::map<std::string, std::string>{}, py::arg("regime") = "nonlinear",
      py::arg("seed") = 0, "(S, X) for one seed under the runner's seed derivation.");

  m.def(
      "run",
      [](const std::string& method, const std::string& regime, std::uint64_t seed_index,
         const std::map<std::string, std::string>& settings) {
        ExperimentSpec spec = spec_from(settings);
        const SweepPoint point = spec.sweep_points().front();
        ScoredRun run;
        {
          py::gil_scoped_release release;
          run = run_scored(spec, parse_regime(regime), parse_method(method), point, seed_index);
        }
        py::dict out = row_dict(run.row);
        out["y"] = run.trace.y;
        out["sources"] = run.inputs.sources.data;
        out["mixed"] = run.inputs.mixed.data;
        out["refresh_steps"] = run.trace.refresh_steps;
        out["alpha_trace"] = run.trace.alpha_trace;
        py::list diags;
        for (const auto& d : run.trace.diag_trace) diags.append(diag_dict(d));
        out["diagnostics"] = diags;
        out["esp_margin"] = run.trace.esp_margin;
        out["converged"] = run.trace.converged;
        return out;
      },
      py::arg("method"), py::arg("regime") = "nonlinear", py::arg("seed") = 0,
      py::arg("settings") = std::map<std::string, std::string>{},
      "Run and score one (method, regime, seed). Settings are runner config keys.");

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& settings, bool write) {
        ExperimentSpec spec = spec_from(settings);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(spec);
          if (write) write_outputs(spec, r);
        }
        py::list per_seed, aggregates, errors;
        for (const auto& row : r.per_seed) per_seed.append(row_dict(row));
        for (const auto& a : r.aggregates) aggregates.append(aggregate_dict(a));
        for (const auto& e : r.errors) errors.append(e.message);
        py::dict out;
        out["per_seed"] = per_seed;
        out["aggregate"] = aggregates;
        out["errors"] = errors;
        return out;
      },
      py::arg("settings") = std::map<std::string, std::string>{}, py::arg("write") = false);

  m.def(
      "fastica",
      [](const Matrix& x, std::uint64_t seed, Index max_iter, double tol) {
        const FastIcaResult r = fastica_batch(x, {max_iter, tol, seed});
        py::dict out;
        out["y"] = r.y;
        out["unmixing"] = r.unmixing;
        out["converged"] = r.converged;
        out["iterations"] = r.iterations;
        return out;
      },
      py::arg("x"), py::arg("seed") = 0, py::arg("max_iter") = 500, py::arg("tol") = 1e-6);

  m.def(
      "si_sdr",
      [](const Eigen::VectorXd& target, const Eigen::VectorXd& estimate) {
        return si_sdr({target.data(), static_cast<std::size_t>(target.size())},
                      {estimate.data(), static_cast<std::size_t>(estimate.size())});
      },
      py::arg("target"), py::arg("estimate"));

  m.def(
      "lag_corr_matrix",
      [](const Matrix& s, const Matrix& y, Index max_lag) {
        const LagCorrelation lc = lag_corr_matrix(s, y, max_lag);
        return py::make_tuple(lc.rho, Eigen::MatrixXi(lc.lag), lc.sign);
      },
      py::arg("s"), py::arg("y"), py::arg("max_lag") = 200,
      "(rho, lag, sign); lag tau pairs s[t] with y[t + tau].");

  m.def(
      "hungarian_match",
      [](const Matrix& scores) {
        const Assignment a = hungarian_match(scores);
        return py::make_tuple(a.perm, a.total);
      },
      py::arg("scores"));

  m.def(
      "evaluate",
      [](const Matrix& s, const Matrix& y, Index window, Index max_lag) {
        const MetricsReport r = evaluate(s, y, window, max_lag);
        py::dict out;
        out["si_sdr_sc"] = r.si_sdr_sc.per_source;
        out["si_sdr_sc_mean"] = r.si_sdr_sc.mean;
        out["mean_abs_corr"] = r.mean_abs_corr;
        out["perm"] = r.match.perm;
        out["lags"] = r.match.lags;
        out["signs"] = r.match.signs;
        return out;
      },
      py::arg("s"), py::arg("y"), py::arg("window") = 5000, py::arg("max_lag") = 200);

  m.def(
      "running_si_sdr",
      [](const Matrix& s, const Matrix& y, Index window, Index stride, Index first_end) {
        std::vector<Index> t;
        std::vector<double> v;
        for (const auto& p : running_si_sdr(s, y, window, stride, first_end)) {
          t.push_back(p.t);
          v.push_back(p.value);
        }
        return py::make_tuple(t, v);
      },
      py::arg("s"), py::arg("y"), py::arg("window") = 2000, py::arg("stride") = 100,
      py::arg("first_end") = 0);

  m.def(
      "rsi_diagnostics",
      [](const Matrix& cov, const Matrix& basis, Index n_pass) {
        return diag_dict(diagnostics(cov, basis, n_pass));
      },
      py::arg("cov"), py::arg("basis"), py::arg("n_pass"));

  m.def("entry_condition", &entry_condition, py::arg("cxx"), py::arg("cpp"), py::arg("alpha"));
  m.def("symmetric_orthogonalize", &symmetric_orthogonalize, py::arg("w"));
  m.def("lr_schedule", &lr_schedule, py::arg("t"), py::arg("warmup") = 1000,
        py::arg("ramp") = 2000, py::arg("eta") = 5e-3);
}
