#include "reoica/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "reoica/csv.hpp"

namespace reoica {

namespace {

const std::set<std::string> kSweepKeys{"N", "eps", "arch", "gamma", "snr_db"};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("setting '" + key + "': expected a number, got '" + value + "'");
  }
}

Index to_index(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v != std::floor(v) || v < 0) throw ConfigError("setting '" + key + "': expected an integer");
  return static_cast<Index>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError("setting '" + key + "': expected a boolean, got '" + value + "'");
}

double steady_mean(const RunTrace& trace, Index T, Index window,
                   double RsiDiagnostics::*field) {
  double sum = 0.0;
  Index count = 0;
  for (std::size_t k = 0; k < trace.diag_trace.size(); ++k) {
    if (trace.refresh_steps[k] > T - window) {
      sum += trace.diag_trace[k].*field;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

RunConfig config_for(const ExperimentSpec& spec, Regime regime, Method method,
                     const SweepPoint& point, std::uint64_t seed_index) {
  RunConfig c = spec.base;
  c.regime = regime;
  c.method = method;
  c.seed = run_seed(spec.master_seed, seed_index);
  c.reservoir.mode = point.arch;
  c.N = point.N;
  c.epsilon = point.eps;
  c.gamma = point.gamma;
  c.snr_db = point.snr_db;
  return c;
}

void write_point_columns(csv::Writer& w, const SweepPoint& p) {
  w.field(to_string(p.arch)).field(static_cast<long long>(p.N)).field(p.eps);
}

std::filesystem::path suffixed(const ExperimentSpec& spec, const std::string& stem,
                               const SweepPoint& p, bool multi) {
  return spec.output_dir / (multi ? stem + "_" + p.label() + ".csv" : stem + ".csv");
}

}  // namespace

std::string SweepPoint::label() const {
  std::ostringstream os;
  os << "arch-" << to_string(arch) << "_N-" << N << "_eps-" << csv::format_double(eps)
     << "_gamma-" << csv::format_double(gamma) << "_snr-" << csv::format_double(snr_db);
  return os.str();
}

void ExperimentSpec::validate() const {
  if (regimes.empty()) throw ConfigError("experiment: no regimes");
  if (methods.empty()) throw ConfigError("experiment: no methods");
  if (seeds.empty()) throw ConfigError("experiment: no seeds");
  if (sources.empty()) throw ConfigError("experiment: no sources");
  for (const auto& [key, values] : sweep) {
    if (!kSweepKeys.contains(key)) throw ConfigError("experiment: unknown sweep key '" + key + "'");
    if (values.empty()) throw ConfigError("experiment: empty sweep list for '" + key + "'");
  }
  if (jobs == 0) throw ConfigError("experiment: jobs must be >= 1");
  if (eval_window > base.T) throw ConfigError("experiment: evaluation window exceeds T");
  (void)sweep_points();
}

std::vector<SweepPoint> ExperimentSpec::sweep_points() const {
  SweepPoint seed_point;
  seed_point.arch = base.reservoir.mode;
  seed_point.N = base.N;
  seed_point.eps = base.epsilon;
  seed_point.gamma = base.gamma;
  seed_point.snr_db = base.snr_db;
  std::vector<SweepPoint> points{seed_point};
  // std::map iteration order keeps the grid order deterministic
  for (const auto& [key, values] : sweep) {
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (const auto& v : values) {
        SweepPoint q = p;
        if (key == "N") q.N = to_index(key, v);
        else if (key == "eps") q.eps = to_double(key, v);
        else if (key == "arch") q.arch = parse_architecture(v);
        else if (key == "gamma") q.gamma = to_double(key, v);
        else if (key == "snr_db") q.snr_db = to_double(key, v);
        else throw ConfigError("experiment: unknown sweep key '" + key + "'");
        next.push_back(q);
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const Index lo = to_index("seeds", trim(text.substr(0, dots)));
    const Index hi = to_index("seeds", trim(text.substr(dots + 2)));
    if (hi < lo) throw ConfigError("seeds: empty range '" + text + "'");
    for (Index s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    return out;
  }
  for (const auto& item : split_list(text))
    out.push_back(static_cast<std::uint64_t>(to_index("seeds", item)));
  return out;
}

void apply_setting(ExperimentSpec& spec, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  RunConfig& b = spec.base;

  if (key.rfind("sweep.", 0) == 0) {
    const std::string sweep_key = key.substr(6);
    if (!kSweepKeys.contains(sweep_key))
      throw ConfigError("unknown sweep key '" + sweep_key + "'");
    spec.sweep[sweep_key] = split_list(value);
    return;
  }
  if (key == "regimes" || key == "regime") {
    spec.regimes.clear();
    for (const auto& v : split_list(value)) spec.regimes.push_back(parse_regime(v));
  } else if (key == "methods" || key == "method") {
    spec.methods.clear();
    for (const auto& v : split_list(value)) spec.methods.push_back(parse_method(v));
  } else if (key == "seeds") {
    spec.seeds = value.empty() ? std::vector<std::uint64_t>{} : parse_seed_list(value);
  } else if (key == "sources") {
    spec.sources.clear();
    for (const auto& v : split_list(value)) spec.sources.push_back(parse_source_kind(v));
  } else if (key == "T") {
    b.T = to_index(key, value);
  } else if (key == "out") {
    spec.output_dir = value;
  } else if (key == "jobs") {
    spec.jobs = static_cast<unsigned>(to_index(key, value));
  } else if (key == "reference") {
    (void)parse_method(value);
    spec.reference = value;
  } else if (key == "master_seed") {
    spec.master_seed = static_cast<std::uint64_t>(to_index(key, value));
  } else if (key == "curves") {
    spec.curves = to_bool(key, value);
  } else if (key == "eval_window") {
    spec.eval_window = to_index(key, value);
  } else if (key == "max_lag") {
    spec.max_lag = to_index(key, value);
  } else if (key == "curve_window") {
    spec.curve_window = to_index(key, value);
  } else if (key == "curve_stride") {
    spec.curve_stride = to_index(key, value);
  } else if (key == "N") {
    b.N = to_index(key, value);
  } else if (key == "d") {
    b.d = to_index(key, value);
  } else if (key == "eps") {
    b.epsilon = to_double(key, value);
  } else if (key == "drift_freq") {
    b.drift_freq = to_double(key, value);
  } else if (key == "gamma") {
    b.gamma = to_double(key, value);
  } else if (key == "snr_db") {
    b.snr_db = to_double(key, value);
  } else if (key == "cond_max") {
    b.cond_max = to_double(key, value);
  } else if (key == "arch") {
    b.reservoir.mode = parse_architecture(value);
  } else if (key == "leak") {
    b.reservoir.leak = to_double(key, value);
  } else if (key == "spectral_radius") {
    b.reservoir.spectral_radius = to_double(key, value);
  } else if (key == "input_scale") {
    b.reservoir.input_scale = to_double(key, value);
  } else if (key == "density") {
    b.reservoir.density = to_double(key, value);
  } else if (key == "forgetting") {
    b.forgetting = to_double(key, value);
  } else if (key == "refresh_period") {
    b.refresh_period = to_index(key, value);
  } else if (key == "eta") {
    b.eta = to_double(key, value);
  } else if (key == "ortho_period") {
    b.ortho_period = to_index(key, value);
  } else if (key == "warmup") {
    b.warmup = to_index(key, value);
  } else if (key == "ramp") {
    b.ramp = to_index(key, value);
  } else if (key == "ier_target") {
    b.controller.ier_target = to_double(key, value);
  } else if (key == "rho_target") {
    b.controller.rho_target = to_double(key, value);
  } else if (key == "kappa") {
    b.controller.kappa = to_double(key, value);
  } else if (key == "kappa_g") {
    b.controller.kappa_guard = to_double(key, value);
  } else if (key == "alpha_min") {
    b.controller.alpha_min = to_double(key, value);
  } else if (key == "guarded_readout" || key == "unguarded_readout") {
    ReadoutScaling scaling;
    if (value == "inv_n") scaling = ReadoutScaling::inv_n;
    else if (value == "inv_sqrt_n") scaling = ReadoutScaling::inv_sqrt_n;
    else throw ConfigError(key + ": expected inv_n or inv_sqrt_n");
    (key == "guarded_readout" ? b.guarded_readout_scaling : b.unguarded_readout_scaling) = scaling;
  } else if (key == "alpha_max") {
    b.controller.alpha_max = to_double(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

MeanSem mean_sem(std::span<const double> values) {
  MeanSem r;
  std::vector<double> finite;
  for (double v : values) {
    if (std::isfinite(v)) finite.push_back(v);
    else ++r.excluded;
  }
  r.count = static_cast<Index>(finite.size());
  if (finite.empty()) {
    r.mean = r.sem = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.mean = mean_of(finite);
  if (finite.size() < 2) {
    r.sem = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  double ss = 0.0;
  for (double v : finite) ss += (v - r.mean) * (v - r.mean);
  const double sd = std::sqrt(ss / static_cast<double>(finite.size() - 1));
  r.sem = sd / std::sqrt(static_cast<double>(finite.size()));
  return r;
}

std::vector<AggregateRow> aggregate_seeds(std::span<const SeedRow> rows,
                                          const std::string& reference) {
  std::vector<AggregateRow> out;
  if (rows.empty()) return out;
  for (const auto& r : rows) {
    if (r.regime != rows.front().regime || !(r.point == rows.front().point))
      throw AggregationError("aggregate_seeds: rows span several (regime, sweep point) groups");
  }

  std::vector<Method> methods;
  for (const auto& r : rows)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);

  const auto ref_value = [&](std::uint64_t seed) -> std::optional<double> {
    for (const auto& r : rows)
      if (to_string(r.method) == reference && r.seed == seed) return r.si_sdr_sc_mean;
    return std::nullopt;
  };

  for (Method m : methods) {
    std::vector<double> sdr, corr, ier, sso, rho, coh;
    AggregateRow a;
    a.regime = rows.front().regime;
    a.point = rows.front().point;
    a.method = m;
    a.reference = reference;
    Index wins = 0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      sdr.push_back(r.si_sdr_sc_mean);
      corr.push_back(r.mean_abs_corr);
      ier.push_back(r.ier);
      sso.push_back(r.sso);
      rho.push_back(r.rho_x);
      coh.push_back(r.coherence);
      if (const auto ref = ref_value(r.seed)) {
        ++a.compared;
        if (r.si_sdr_sc_mean > *ref) ++wins;
      }
    }
    const MeanSem s = mean_sem(sdr);
    const MeanSem c = mean_sem(corr);
    a.seeds = static_cast<Index>(sdr.size());
    a.si_sdr_mean = s.mean;
    a.si_sdr_sem = s.sem;
    a.excluded_inf = s.excluded;
    a.corr_mean = c.mean;
    a.corr_sem = c.sem;
    if (to_string(m) != reference && a.compared > 0) a.wins = wins;
    a.ier = mean_sem(ier).mean;
    a.sso = mean_sem(sso).mean;
    a.rho_x = mean_sem(rho).mean;
    a.coherence = mean_sem(coh).mean;
    out.push_back(a);
  }
  return out;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t seed_index) {
  return derive_seed(master_seed, seed_index, "run");
}

ScoredRun run_scored(const ExperimentSpec& spec, Regime regime, Method method,
                     const SweepPoint& point, std::uint64_t seed_index) {
  const RunConfig c = config_for(spec, regime, method, point, seed_index);
  ScoredRun out;
  out.inputs = make_inputs(c, spec.sources);
  out.trace = run_method(c, out.inputs.sources, out.inputs.mixed);
  const MetricsReport m =
      evaluate(out.inputs.sources.data, out.trace.y, spec.eval_window, spec.max_lag);

  SeedRow& row = out.row;
  row.regime = regime;
  row.method = method;
  row.point = point;
  row.seed = seed_index;
  row.si_sdr_sc_mean = m.si_sdr_sc.mean;
  row.per_source = m.si_sdr_sc.per_source;
  row.mean_abs_corr = m.mean_abs_corr;
  const Index T = c.T;
  row.ier = steady_mean(out.trace, T, spec.eval_window, &RsiDiagnostics::ier);
  row.sso = steady_mean(out.trace, T, spec.eval_window, &RsiDiagnostics::sso);
  row.rho_x = steady_mean(out.trace, T, spec.eval_window, &RsiDiagnostics::rho_x);
  row.coherence = steady_mean(out.trace, T, spec.eval_window, &RsiDiagnostics::coherence);
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto points = spec.sweep_points();

  struct Task {
    Regime regime;
    Method method;
    SweepPoint point;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& p : points)
    for (Regime r : spec.regimes)
      for (Method m : spec.methods)
        for (std::uint64_t s : spec.seeds) tasks.push_back({r, m, p, s});

  struct Outcome {
    std::optional<SeedRow> row;
    std::vector<CurvePoint> curve;
    std::vector<DiagRow> diag;
    std::string error;
  };
  std::vector<Outcome> outcomes(tasks.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      const Task& task = tasks[k];
      Outcome& o = outcomes[k];
      try {
        ScoredRun run = run_scored(spec, task.regime, task.method, task.point, task.seed);
        if (spec.curves) {
          o.curve = running_si_sdr(run.inputs.sources.data, run.trace.y, spec.curve_window,
                                   spec.curve_stride, spec.base.warmup);
        }
        for (std::size_t i = 0; i < run.trace.refresh_steps.size(); ++i) {
          if (i >= run.trace.diag_trace.size()) break;
          o.diag.push_back({task.regime, task.method, task.point, task.seed,
                            run.trace.refresh_steps[i], run.trace.alpha_trace[i],
                            run.trace.diag_trace[i]});
        }
        o.row = std::move(run.row);
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }
  };
  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(tasks.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
  }

  // serial collection in task order keeps every output file reproducible
  ExperimentResult result;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const Task& task = tasks[k];
    Outcome& o = outcomes[k];
    if (!o.row) {
      result.errors.push_back({task.regime, task.method, task.point, task.seed, o.error});
      continue;
    }
    result.per_seed.push_back(*o.row);
    for (const auto& c : o.curve)
      result.curves.push_back({task.regime, task.method, task.point, task.seed, c.t, c.value});
    for (auto& d : o.diag) result.diagnostics.push_back(std::move(d));
  }
  for (const auto& p : points) {
    for (Regime r : spec.regimes) {
      std::vector<SeedRow> group;
      for (const auto& row : result.per_seed)
        if (row.regime == r && row.point == p) group.push_back(row);
      for (auto& a : aggregate_seeds(group, spec.reference)) result.aggregates.push_back(a);
    }
  }
  return result;
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result) {
  std::filesystem::create_directories(spec.output_dir);
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
  };

  {
    std::ofstream f = open(spec.output_dir / "per_seed.csv");
    csv::Writer w(f);
    w.row({"regime", "method", "arch", "N", "eps", "seed", "si_sdr_sc_mean", "per_source_1",
           "per_source_2", "per_source_3", "mean_abs_corr", "ier", "sso", "rho_x", "coherence"});
    for (const auto& r : result.per_seed) {
      w.field(to_string(r.regime)).field(to_string(r.method));
      write_point_columns(w, r.point);
      w.field(static_cast<long long>(r.seed)).field(r.si_sdr_sc_mean);
      for (std::size_t i = 0; i < 3; ++i) {
        if (i < r.per_source.size()) w.field(r.per_source[i]);
        else w.empty();
      }
      w.field(r.mean_abs_corr).field(r.ier).field(r.sso).field(r.rho_x).field(r.coherence);
      w.end_row();
    }
  }
  {
    std::ofstream f = open(spec.output_dir / "aggregate.csv");
    csv::Writer w(f);
    w.row({"regime", "method", "arch", "N", "eps", "gamma", "snr_db", "seeds", "si_sdr_sc_mean",
           "si_sdr_sc_sem", "corr_mean", "corr_sem", "wins", "compared", "reference", "ier",
           "sso", "rho_x", "coherence", "excluded_inf"});
    for (const auto& a : result.aggregates) {
      w.field(to_string(a.regime)).field(to_string(a.method));
      write_point_columns(w, a.point);
      w.field(a.point.gamma).field(a.point.snr_db);
      w.field(static_cast<long long>(a.seeds)).field(a.si_sdr_mean).field(a.si_sdr_sem);
      w.field(a.corr_mean).field(a.corr_sem);
      if (a.wins) w.field(static_cast<long long>(*a.wins));
      else w.empty();
      w.field(static_cast<long long>(a.compared)).field(a.reference);
      w.field(a.ier).field(a.sso).field(a.rho_x).field(a.coherence);
      w.field(static_cast<long long>(a.excluded_inf));
      w.end_row();
    }
  }

  const auto points = spec.sweep_points();
  const bool multi = points.size() > 1;
  for (const auto& p : points) {
    if (spec.curves) {
      std::ofstream f = open(suffixed(spec, "curves", p, multi));
      csv::Writer w(f);
      w.row({"regime", "method", "seed", "t", "running_si_sdr"});
      for (const auto& c : result.curves) {
        if (!(c.point == p)) continue;
        w.field(to_string(c.regime)).field(to_string(c.method));
        w.field(static_cast<long long>(c.seed)).field(static_cast<long long>(c.t)).field(c.value);
        w.end_row();
      }
    }
    std::ofstream f = open(suffixed(spec, "diagnostics", p, multi));
    csv::Writer w(f);
    w.row({"regime", "method", "seed", "refresh_step", "alpha", "ier", "sso", "rho_x",
           "coherence"});
    for (const auto& d : result.diagnostics) {
      if (!(d.point == p)) continue;
      w.field(to_string(d.regime)).field(to_string(d.method));
      w.field(static_cast<long long>(d.seed)).field(static_cast<long long>(d.step));
      w.field(d.alpha).field(d.diag.ier).field(d.diag.sso).field(d.diag.rho_x);
      w.field(d.diag.coherence);
      w.end_row();
    }
  }
  {
    std::ofstream f = open(spec.output_dir / "errors.csv");
    csv::Writer w(f);
    w.row({"regime", "method", "arch", "N", "eps", "seed", "error"});
    for (const auto& e : result.errors) {
      w.field(to_string(e.regime)).field(to_string(e.method));
      write_point_columns(w, e.point);
      w.field(static_cast<long long>(e.seed)).field(e.message);
      w.end_row();
    }
  }
}

}  // namespace reoica
