#include "reoica/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace reoica {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairCorr {
  double value = 0.0;  // signed
  bool degenerate = false;
};

// Pearson correlation of a[0..len) and b[0..len), population normalization.
PairCorr pearson(const double* a, const double* b, Index len) {
  double ma = 0.0, mb = 0.0;
  for (Index i = 0; i < len; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(len);
  mb /= static_cast<double>(len);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (Index i = 0; i < len; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return {0.0, true};
  return {std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0), false};
}

}  // namespace

LagCorrelation lag_corr_matrix(const Matrix& s, const Matrix& y, Index max_lag) {
  if (s.rows() != y.rows() || s.cols() != y.cols())
    throw MetricError("lag_corr_matrix: S and Y shapes differ");
  const Index n = s.rows();
  const Index L = s.cols();
  if (max_lag < 0 || L <= 2 * max_lag + 2)
    throw MetricError("lag_corr_matrix: window too short for lag range");

  // row-major copies so each series is contiguous
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix sr = s;
  const RowMatrix yr = y;

  LagCorrelation out;
  out.rho = Matrix::Zero(n, n);
  out.lag = Eigen::MatrixXi::Zero(n, n);
  out.sign = Matrix::Ones(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double best = -1.0;
      // scan 0, +1, -1, +2, -2, ... so ties resolve to the smallest |lag|
      for (Index k = 0; k <= 2 * max_lag; ++k) {
        const Index tau = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
        const Index s0 = std::max<Index>(0, -tau);
        const Index y0 = s0 + tau;
        const Index len = L - std::abs(tau);
        const PairCorr c = pearson(sr.row(i).data() + s0, yr.row(j).data() + y0, len);
        if (c.degenerate) out.degenerate = true;
        if (std::abs(c.value) > best) {
          best = std::abs(c.value);
          out.rho(i, j) = best;
          out.lag(i, j) = static_cast<int>(tau);
          out.sign(i, j) = c.value < 0.0 ? -1.0 : 1.0;
        }
      }
    }
  }
  return out;
}

Assignment hungarian_match(const Matrix& scores) {
  const Index n = scores.rows();
  if (n < 1 || scores.cols() != n) throw MetricError("hungarian_match: need a square matrix");

  // Potential-based shortest augmenting path on cost = -score, 1-based.
  const auto cost = [&](Index i, Index j) { return -scores(i - 1, j - 1); };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.perm.assign(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j) out.perm[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  for (Index i = 0; i < n; ++i) out.total += scores(i, out.perm[static_cast<std::size_t>(i)]);
  return out;
}

MatchResult match_sources(const LagCorrelation& lc) {
  const Assignment a = hungarian_match(lc.rho);
  MatchResult m;
  m.perm = a.perm;
  for (std::size_t i = 0; i < a.perm.size(); ++i) {
    const Index r = static_cast<Index>(i);
    const Index c = a.perm[i];
    m.lags.push_back(lc.lag(r, c));
    m.signs.push_back(lc.sign(r, c));
    m.corrs.push_back(lc.rho(r, c));
  }
  return m;
}

double si_sdr(std::span<const double> target, std::span<const double> estimate) {
  if (target.size() != estimate.size() || target.size() < 2)
    throw MetricError("si_sdr: sequences must have equal length >= 2");
  double tt = 0.0, et = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    tt += target[i] * target[i];
    et += estimate[i] * target[i];
    ee += estimate[i] * estimate[i];
  }
  if (!(tt > 0.0)) throw MetricError("si_sdr: zero target");
  if (!(ee > 0.0)) return -kInf;

  const double scale = et / tt;
  double signal = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double proj = scale * target[i];
    signal += proj * proj;
    residual += (proj - estimate[i]) * (proj - estimate[i]);
  }
  if (residual <= 1e-20 * signal) return kInf;
  if (!(signal > 0.0)) return -kInf;
  return 10.0 * std::log10(signal / residual);
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

SiSdrScores si_sdr_sc(const Matrix& s, const Matrix& y, const MatchResult& match) {
  const Index n = s.rows();
  const Index L = s.cols();
  if (y.rows() != n || y.cols() != L || static_cast<Index>(match.perm.size()) != n)
    throw MetricError("si_sdr_sc: inconsistent shapes");

  SiSdrScores out;
  std::vector<double> target, estimate;
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Index j = match.perm[k];
    const Index tau = match.lags[k];
    const Index s0 = std::max<Index>(0, -tau);
    const Index y0 = s0 + tau;
    const Index len = L - std::abs(tau);
    target.resize(static_cast<std::size_t>(len));
    estimate.resize(static_cast<std::size_t>(len));
    for (Index t = 0; t < len; ++t) {
      target[static_cast<std::size_t>(t)] = s(i, s0 + t);
      estimate[static_cast<std::size_t>(t)] = match.signs[k] * y(j, y0 + t);
    }
    out.per_source.push_back(si_sdr(target, estimate));
  }
  out.mean = mean_of(out.per_source);
  return out;
}

MetricsReport evaluate(const Matrix& s, const Matrix& y, Index window, Index max_lag) {
  if (window > s.cols()) throw MetricError("evaluate: window exceeds series length");
  const Matrix sw = s.rightCols(window);
  const Matrix yw = y.rightCols(window);
  const LagCorrelation lc = lag_corr_matrix(sw, yw, max_lag);
  MetricsReport r;
  r.match = match_sources(lc);
  r.si_sdr_sc = si_sdr_sc(sw, yw, r.match);
  r.mean_abs_corr = mean_of(r.match.corrs);
  r.degenerate = lc.degenerate;
  return r;
}

std::vector<CurvePoint> running_si_sdr(const Matrix& s, const Matrix& y, Index window,
                                       Index stride, Index first_end) {
  const Index n = s.rows();
  const Index T = s.cols();
  if (y.rows() != n || y.cols() != T) throw MetricError("running_si_sdr: shapes differ");
  if (window < 2 || window > T) throw MetricError("running_si_sdr: invalid window");
  if (stride < 1) throw MetricError("running_si_sdr: stride must be positive");

  std::vector<CurvePoint> curve;
  Matrix zero_lag(n, n);
  std::vector<double> per_pair(static_cast<std::size_t>(n));
  for (Index end = std::max(window, first_end); end <= T; end += stride) {
    const Index begin = end - window;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const Vector a = s.row(i).segment(begin, window).transpose();
        const Vector b = y.row(j).segment(begin, window).transpose();
        zero_lag(i, j) = std::abs(pearson(a.data(), b.data(), window).value);
      }
    const Assignment match = hungarian_match(zero_lag);
    for (Index i = 0; i < n; ++i) {
      const Vector a = s.row(i).segment(begin, window).transpose();
      const Vector b = y.row(match.perm[static_cast<std::size_t>(i)]).segment(begin, window).transpose();
      per_pair[static_cast<std::size_t>(i)] =
          si_sdr({a.data(), static_cast<std::size_t>(window)},
                 {b.data(), static_cast<std::size_t>(window)});
    }
    curve.push_back({end, mean_of(per_pair)});
  }
  return curve;
}

}  // namespace reoica
