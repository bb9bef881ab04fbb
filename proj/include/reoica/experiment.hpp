#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reoica/metrics.hpp"
#include "reoica/pipeline.hpp"

namespace reoica {

/// One point of the parameter grid. Unset fields fall back to the base config.
struct SweepPoint {
  Architecture arch = Architecture::esn;
  Index N = 500;
  double eps = 0.3;
  double gamma = 0.8;
  double snr_db = 10.0;

  bool operator==(const SweepPoint&) const = default;
  std::string label() const;
};

struct ExperimentSpec {
  std::vector<Regime> regimes{Regime::static_mix, Regime::time_varying, Regime::nonlinear};
  std::vector<Method> methods{Method::reoica_base, Method::vanilla, Method::fastica};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<SourceKind> sources{SourceKind::lorenz, SourceKind::mackey_glass,
                                  SourceKind::chirp};
  RunConfig base;  // method/regime/seed are overwritten per run
  std::map<std::string, std::vector<std::string>> sweep;  // key -> values
  std::uint64_t master_seed = 0;
  std::string reference = "vanilla";
  Index eval_window = 5000;
  Index max_lag = 200;
  Index curve_window = 2000;
  Index curve_stride = 100;
  bool curves = true;
  std::filesystem::path output_dir = "results";
  unsigned jobs = 1;

  /// Throws ConfigError on empty lists or unknown sweep keys.
  void validate() const;
  std::vector<SweepPoint> sweep_points() const;
};

/// Applies one `key=value` setting (config file line or CLI override).
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Parses a flat key=value config file ('#' starts a comment).
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

/// "0..9" or "0,3,5".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

struct SeedRow {
  Regime regime = Regime::static_mix;
  Method method = Method::vanilla;
  SweepPoint point;
  std::uint64_t seed = 0;
  double si_sdr_sc_mean = 0.0;
  std::vector<double> per_source;
  double mean_abs_corr = 0.0;
  // steady-state means over refreshes in the evaluation window (NaN if none)
  double ier = 0.0;
  double sso = 0.0;
  double rho_x = 0.0;
  double coherence = 0.0;
};

struct AggregateRow {
  Regime regime = Regime::static_mix;
  Method method = Method::vanilla;
  SweepPoint point;
  Index seeds = 0;
  double si_sdr_mean = 0.0;
  double si_sdr_sem = 0.0;
  double corr_mean = 0.0;
  double corr_sem = 0.0;
  std::optional<Index> wins;  // seeds where method > reference; empty for the reference
  Index compared = 0;
  std::string reference;
  double ier = 0.0;
  double sso = 0.0;
  double rho_x = 0.0;
  double coherence = 0.0;
  Index excluded_inf = 0;  // non-finite SI-SDR values left out of the mean
};

struct CurveRow {
  Regime regime;
  Method method;
  SweepPoint point;
  std::uint64_t seed;
  Index t;
  double value;
};

struct DiagRow {
  Regime regime;
  Method method;
  SweepPoint point;
  std::uint64_t seed;
  Index step;
  double alpha;
  RsiDiagnostics diag;
};

struct ErrorRow {
  Regime regime;
  Method method;
  SweepPoint point;
  std::uint64_t seed;
  std::string message;
};

struct ExperimentResult {
  std::vector<SeedRow> per_seed;
  std::vector<AggregateRow> aggregates;
  std::vector<CurveRow> curves;
  std::vector<DiagRow> diagnostics;
  std::vector<ErrorRow> errors;
};

/// Mean and standard error (sample stddev / sqrt(count)).
struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
  Index count = 0;
  Index excluded = 0;
};
MeanSem mean_sem(std::span<const double> values);

/// Aggregates per-seed rows that share (regime, sweep point). Throws
/// AggregationError if they do not.
std::vector<AggregateRow> aggregate_seeds(std::span<const SeedRow> rows,
                                          const std::string& reference);

/// Seed used for every component of run `seed_index` under `master_seed`.
std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t seed_index);

/// One fully scored run (exposed for the acceptance suite and bindings).
struct ScoredRun {
  SeedRow row;
  RunTrace trace;
  RunInputs inputs;
};
ScoredRun run_scored(const ExperimentSpec& spec, Regime regime, Method method,
                     const SweepPoint& point, std::uint64_t seed_index);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// per_seed.csv, aggregate.csv, curves*.csv, diagnostics*.csv, errors.csv
void write_outputs(const ExperimentSpec& spec, const ExperimentResult& result);

}  // namespace reoica
