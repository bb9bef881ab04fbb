#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "reoica/metrics.hpp"

using namespace reoica;

namespace {

Matrix noise_rows(Index n, Index L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, L);
  for (Index i = 0; i < n; ++i)
    for (Index t = 0; t < L; ++t) m(i, t) = g(rng);
  return m;
}

// Smooth-ish independent rows so lagged copies stay distinguishable.
Matrix ar_rows(Index n, Index L, std::uint64_t seed) {
  Matrix w = noise_rows(n, L, seed);
  Matrix s(n, L);
  for (Index i = 0; i < n; ++i) {
    double v = 0.0;
    for (Index t = 0; t < L; ++t) {
      v = 0.9 * v + w(i, t);
      s(i, t) = v;
    }
  }
  return s;
}

double brute_pearson(const Matrix& s, const Matrix& y, Index i, Index j, int tau) {
  const Index L = s.cols();
  const Index len = L - std::abs(tau);
  const Index s0 = tau >= 0 ? 0 : -tau;
  const Index y0 = tau >= 0 ? tau : 0;
  double ms = 0, my = 0;
  for (Index k = 0; k < len; ++k) {
    ms += s(i, s0 + k);
    my += y(j, y0 + k);
  }
  ms /= len;
  my /= len;
  double sxy = 0, sxx = 0, syy = 0;
  for (Index k = 0; k < len; ++k) {
    const double a = s(i, s0 + k) - ms, b = y(j, y0 + k) - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  return sxy / std::sqrt(sxx * syy);
}

double sdr(const Vector& target, const Vector& estimate) {
  return si_sdr({target.data(), static_cast<std::size_t>(target.size())},
                {estimate.data(), static_cast<std::size_t>(estimate.size())});
}

}  // namespace

TEST_CASE("lag_corr_matrix on identical signals") {
  const Matrix s = ar_rows(3, 3000, 1);
  const LagCorrelation lc = lag_corr_matrix(s, s);
  for (Index i = 0; i < 3; ++i) {
    CHECK(lc.rho(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lc.lag(i, i) == 0);
    CHECK(lc.sign(i, i) == 1.0);
  }
  const LagCorrelation neg = lag_corr_matrix(s, -s);
  for (Index i = 0; i < 3; ++i) {
    CHECK(neg.rho(i, i) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(neg.sign(i, i) == -1.0);
  }
  CHECK((neg.rho - lc.rho).norm() < 1e-12);
  CHECK(lc.rho.minCoeff() >= 0.0);
  CHECK(lc.rho.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("lag_corr_matrix finds a 50-sample delay") {
  const Index L = 3000;
  const Matrix base = ar_rows(2, L + 50, 2);
  const Matrix s = base.rightCols(L);  // s[t] = base[t + 50]
  const Matrix y = base.leftCols(L);   // y[t] = base[t] = s[t - 50]: delayed
  const LagCorrelation lc = lag_corr_matrix(s, y, 200);
  for (Index i = 0; i < 2; ++i) {
    CHECK(lc.lag(i, i) == 50);
    CHECK(lc.rho(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // exhaustive oracle for an off-diagonal entry
  double best = 0.0;
  for (int tau = -200; tau <= 200; ++tau)
    best = std::max(best, std::abs(brute_pearson(s, y, 0, 1, tau)));
  CHECK(lc.rho(0, 1) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("lag_corr_matrix errors and degenerate rows") {
  const Matrix s = noise_rows(2, 402, 3);
  CHECK_THROWS_AS(lag_corr_matrix(s, s, 200), MetricError);
  CHECK_THROWS_AS(lag_corr_matrix(noise_rows(2, 500, 1), noise_rows(3, 500, 1), 10),
                  MetricError);
  Matrix y = noise_rows(2, 1000, 4);
  y.row(1).setConstant(2.0);
  const LagCorrelation lc = lag_corr_matrix(noise_rows(2, 1000, 5), y, 10);
  CHECK(lc.degenerate);
  CHECK(lc.rho(0, 1) == 0.0);
}

TEST_CASE("hungarian_match examples") {
  const Matrix scores{{0.9, 0.1, 0.2}, {0.2, 0.8, 0.1}, {0.1, 0.3, 0.7}};
  const Assignment a = hungarian_match(scores);
  CHECK(a.perm == std::vector<Index>{0, 1, 2});
  CHECK(a.total == doctest::Approx(2.4));

  CHECK(hungarian_match(Matrix::Identity(4, 4)).perm == std::vector<Index>{0, 1, 2, 3});
  Matrix anti = 0.1 * Matrix::Ones(4, 4);
  for (Index i = 0; i < 4; ++i) anti(i, 3 - i) = 1.0;
  CHECK(hungarian_match(anti).perm == std::vector<Index>{3, 2, 1, 0});

  const Matrix one{{0.42}};
  CHECK(hungarian_match(one).perm == std::vector<Index>{0});
}

TEST_CASE("hungarian_match agrees with exhaustive search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 4;
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = u(rng);
    std::vector<Index> p(n);
    std::iota(p.begin(), p.end(), 0);
    double best = -1.0;
    do {
      double tot = 0.0;
      for (Index i = 0; i < n; ++i) tot += m(i, p[i]);
      best = std::max(best, tot);
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(hungarian_match(m).total == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("si_sdr examples") {
  const Matrix s = noise_rows(2, 4000, 6);
  const Vector t = s.row(0).transpose();
  const Vector e2 = 2.0 * t;
  CHECK(sdr(t, t) == std::numeric_limits<double>::infinity());
  CHECK(sdr(t, e2) == std::numeric_limits<double>::infinity());

  // orthogonal noise with equal power
  Vector noise = s.row(1).transpose();
  noise -= (noise.dot(t) / t.squaredNorm()) * t;
  noise *= t.norm() / noise.norm();
  const Vector est = t + noise;
  CHECK(std::abs(sdr(t, est)) < 1e-9);

  // scalar-arithmetic oracle
  const Vector est2 = t + 0.3 * s.row(1).transpose();
  double dot = 0, tt = 0;
  for (Index k = 0; k < t.size(); ++k) {
    dot += est2(k) * t(k);
    tt += t(k) * t(k);
  }
  const double a = dot / tt;
  double num = 0, den = 0;
  for (Index k = 0; k < t.size(); ++k) {
    num += a * t(k) * a * t(k);
    den += (a * t(k) - est2(k)) * (a * t(k) - est2(k));
  }
  CHECK(sdr(t, est2) == doctest::Approx(10.0 * std::log10(num / den)).epsilon(1e-12));
  CHECK(sdr(t, -3.5 * est2) == doctest::Approx(sdr(t, est2)).epsilon(1e-12));

  CHECK(sdr(t, Vector::Zero(t.size())) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(sdr(Vector::Zero(10), t.head(10)), MetricError);
  CHECK_THROWS_AS(sdr(t.head(10), t.head(11)), MetricError);
}

TEST_CASE("si_sdr_sc on a permuted, delayed, scaled copy") {
  const Index L = 5000;
  const Matrix base = ar_rows(3, L + 30, 7);
  const Matrix s = base.rightCols(L);
  Matrix y(3, L);
  y.row(0) = -2.0 * base.row(2).leftCols(L);
  y.row(1) = 0.5 * base.row(0).leftCols(L);
  y.row(2) = 7.0 * base.row(1).leftCols(L);
  const MatchResult m = match_sources(lag_corr_matrix(s, y, 200));
  CHECK(m.perm == std::vector<Index>{1, 2, 0});
  CHECK(m.lags == std::vector<int>{30, 30, 30});
  CHECK(m.signs == std::vector<double>{1.0, 1.0, -1.0});
  const SiSdrScores sc = si_sdr_sc(s, y, m);
  for (double v : sc.per_source) CHECK(v == std::numeric_limits<double>::infinity());
}

TEST_CASE("si_sdr_sc on a two-source noisy case") {
  const Index L = 3000;
  const Matrix s = ar_rows(2, L, 8);
  const Matrix noise = noise_rows(2, L, 9);
  Matrix y(2, L);
  y.row(0) = s.row(1) + 0.2 * noise.row(0);
  y.row(1) = s.row(0) + 0.5 * noise.row(1);
  const MatchResult m = match_sources(lag_corr_matrix(s, y, 20));
  REQUIRE(m.perm == std::vector<Index>{1, 0});
  REQUIRE(m.lags == std::vector<int>{0, 0});
  const SiSdrScores sc = si_sdr_sc(s, y, m);
  const Vector s0 = s.row(0).transpose(), y1 = y.row(1).transpose();
  const Vector s1 = s.row(1).transpose(), y0 = y.row(0).transpose();
  CHECK(sc.per_source[0] == doctest::Approx(sdr(s0, y1)).epsilon(1e-12));
  CHECK(sc.per_source[1] == doctest::Approx(sdr(s1, y0)).epsilon(1e-12));
  CHECK(sc.mean == doctest::Approx(0.5 * (sc.per_source[0] + sc.per_source[1])));
}

TEST_CASE("evaluate uses the trailing window and reports matched correlations") {
  const Index L = 8000;
  const Matrix s = ar_rows(3, L, 10);
  Matrix y = s + 0.3 * noise_rows(3, L, 11);
  y.leftCols(3000) = noise_rows(3, 3000, 12);
  const MetricsReport r = evaluate(s, y, 5000, 200);
  const MetricsReport direct =
      evaluate(s.rightCols(5000), y.rightCols(5000), 5000, 200);
  CHECK(r.si_sdr_sc.mean == direct.si_sdr_sc.mean);
  double mc = 0.0;
  for (double c : r.match.corrs) mc += c;
  CHECK(r.mean_abs_corr == doctest::Approx(mc / 3.0).epsilon(1e-15));
  CHECK(r.si_sdr_sc.mean > 5.0);
}

TEST_CASE("running_si_sdr") {
  const Index T = 10000;
  const Matrix s = ar_rows(2, T, 13);
  SUBCASE("perfect outputs") {
    const auto curve = running_si_sdr(s, s, 2000, 100);
    CHECK(curve.size() == static_cast<size_t>((T - 2000) / 100 + 1));
    for (const auto& p : curve) CHECK(p.value == std::numeric_limits<double>::infinity());
  }
  SUBCASE("non-overlapping windows") {
    const auto curve = running_si_sdr(s, s, 2000, 2000);
    CHECK(curve.size() == static_cast<size_t>((T - 2000) / 2000 + 1));
    CHECK(curve.front().t == 2000);
    CHECK(curve.back().t == 10000);
  }
  SUBCASE("first evaluation point") {
    const auto curve = running_si_sdr(s, s, 2000, 100, 3000);
    CHECK(curve.front().t == 3000);
    CHECK(curve.size() == static_cast<size_t>((T - 3000) / 100 + 1));
  }
  SUBCASE("drop after the switch to noise") {
    Matrix y = s + 0.1 * noise_rows(2, T, 14);
    y.rightCols(T / 2) = noise_rows(2, T / 2, 15);
    const auto curve = running_si_sdr(s, y, 2000, 1000);
    for (const auto& p : curve) {
      // direct windowed recomputation at zero lag
      const Index t0 = p.t - 2000;
      double acc = 0.0;
      const Matrix sw = s.middleCols(t0, 2000), yw = y.middleCols(t0, 2000);
      const LagCorrelation lc = lag_corr_matrix(sw, yw, 0);
      const MatchResult m = match_sources(lc);
      for (Index i = 0; i < 2; ++i) {
        const Vector tv = sw.row(i).transpose();
        const Vector ev = m.signs[i] * yw.row(m.perm[i]).transpose();
        acc += sdr(tv, ev);
      }
      CHECK(p.value == doctest::Approx(acc / 2.0).epsilon(1e-10));
      if (p.t <= T / 2) CHECK(p.value > 10.0);
      if (p.t - 2000 >= T / 2) CHECK(p.value < -10.0);
    }
  }
  CHECK_THROWS_AS(running_si_sdr(s.leftCols(100), s.leftCols(100), 2000, 100), MetricError);
}
