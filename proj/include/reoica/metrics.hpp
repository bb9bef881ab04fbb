#pragma once

#include <span>
#include <vector>

#include "reoica/common.hpp"

namespace reoica {

/// Lag-scanned |Pearson| correlations between sources (rows of S) and
/// outputs (rows of Y).
///
/// Lag convention: lag tau pairs s[t] with y[t + tau], so an output that is
/// the source delayed by k samples peaks at tau = +k. Correlation uses
/// population normalization over the overlap of length L - |tau|.
struct LagCorrelation {
  Matrix rho;                 // |corr| maximized over lags, in [0, 1]
  Eigen::MatrixXi lag;        // maximizing lag
  Matrix sign;                // sign of the correlation at that lag (+1/-1)
  bool degenerate = false;    // some overlap had zero variance
};

LagCorrelation lag_corr_matrix(const Matrix& s, const Matrix& y, Index max_lag = 200);

struct Assignment {
  std::vector<Index> perm;  // perm[i] = column assigned to row i
  double total = 0.0;
};

/// Maximum-total-score bijection (Hungarian / Kuhn-Munkres, O(n^3)).
Assignment hungarian_match(const Matrix& scores);

struct MatchResult {
  std::vector<Index> perm;  // source i -> output perm[i]
  std::vector<int> lags;
  std::vector<double> signs;
  std::vector<double> corrs;
};

MatchResult match_sources(const LagCorrelation& lc);

/// Scale-invariant SDR in dB. +inf when the residual vanishes numerically,
/// -inf for an all-zero estimate. Throws MetricError for a zero target.
double si_sdr(std::span<const double> target, std::span<const double> estimate);

struct SiSdrScores {
  std::vector<double> per_source;
  double mean = 0.0;
};

/// Lag-compensated, sign-corrected SI-SDR on matched pairs.
SiSdrScores si_sdr_sc(const Matrix& s, const Matrix& y, const MatchResult& match);

struct MetricsReport {
  SiSdrScores si_sdr_sc;
  double mean_abs_corr = 0.0;
  MatchResult match;
  bool degenerate = false;
};

/// Steady-state evaluation on the trailing `window` samples.
MetricsReport evaluate(const Matrix& s, const Matrix& y, Index window = 5000,
                       Index max_lag = 200);

struct CurvePoint {
  Index t = 0;  // end of the trailing window (exclusive), in samples
  double value = 0.0;
};

/// Trailing-window unshifted SI-SDR: on each window, outputs are matched to
/// sources by zero-lag |corr| and scored at lag 0. Evaluation points are
/// t = first_end, first_end + stride, ... <= T, with first_end >= window.
std::vector<CurvePoint> running_si_sdr(const Matrix& s, const Matrix& y, Index window = 2000,
                                       Index stride = 100, Index first_end = 0);

double mean_of(std::span<const double> values);

}  // namespace reoica
