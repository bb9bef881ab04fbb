#include <cmath>

#include "doctest.h"
#include "reoica/fastica.hpp"
#include "reoica/metrics.hpp"
#include "reoica/mixing.hpp"
#include "reoica/signals.hpp"

using namespace reoica;

namespace {

// Square and sawtooth share one period, so they are not mutually independent;
// keep at most one of them per set.
const std::vector<SourceKind> kLaplace{SourceKind::laplace, SourceKind::laplace,
                                       SourceKind::laplace};
const std::vector<SourceKind> kMixed{SourceKind::laplace, SourceKind::sawtooth,
                                     SourceKind::laplace};

}  // namespace

TEST_CASE("fastica recovers unmixed independent sources") {
  const SourceMatrix s = generate_sources(kLaplace, 10000, 5);
  const FastIcaResult r = fastica_batch(s.data, {.seed = 1});
  CHECK(r.converged);
  const MatchResult m = match_sources(lag_corr_matrix(s.data, r.y, 0));
  for (double c : m.corrs) CHECK(c > 0.999);
}

TEST_CASE("fastica outputs are decorrelated") {
  const SourceMatrix s = generate_sources(kMixed, 10000, 6);
  const Matrix a = random_mixing_matrix(3, 5.0, 6);
  const FastIcaResult r = fastica_batch(a * s.data, {.seed = 2});
  REQUIRE(r.converged);
  const Matrix yc = r.y.colwise() - r.y.rowwise().mean();
  const Matrix cov = yc * yc.transpose() / static_cast<double>(yc.cols());
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(cov(i, j)) < 1e-6);
  const MatchResult m = match_sources(lag_corr_matrix(s.data, r.y, 0));
  for (double c : m.corrs) CHECK(c > 0.99);
}

TEST_CASE("fastica is scale invariant and deterministic") {
  const SourceMatrix s = generate_sources(kMixed, 6000, 7);
  const Matrix x = random_mixing_matrix(3, 3.0, 7) * s.data;
  const FastIcaResult r1 = fastica_batch(x, {.seed = 3});
  const FastIcaResult r2 = fastica_batch(2.0 * x, {.seed = 3});
  for (Index i = 0; i < 3; ++i) {
    const double d = std::min((r1.y.row(i) - r2.y.row(i)).norm(),
                              (r1.y.row(i) + r2.y.row(i)).norm());
    CHECK(d / r1.y.row(i).norm() < 1e-6);
  }
  const FastIcaResult r3 = fastica_batch(x, {.seed = 3});
  CHECK(r3.y == r1.y);
  CHECK(r3.iterations == r1.iterations);
}

TEST_CASE("fastica reports non-convergence instead of throwing") {
  const SourceMatrix s = generate_sources(kMixed, 3000, 8);
  const FastIcaResult r = fastica_batch(s.data, {.max_iter = 1, .tol = 1e-15, .seed = 4});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.y.allFinite());
}
