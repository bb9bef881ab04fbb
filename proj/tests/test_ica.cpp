#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "doctest.h"
#include "reoica/ica.hpp"

using namespace reoica;

namespace {

Matrix gaussian_matrix(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST_CASE("natgrad_step worked examples") {
  SUBCASE("zero input scales W") {
    DemixingState st = make_demixing_state(3, 1000);
    st.w = gaussian_matrix(3, 1);
    const Matrix w0 = st.w;
    const Vector y = natgrad_step(st, Vector::Zero(3), 0.01);
    CHECK(y.norm() == 0.0);
    CHECK((st.w - 1.01 * w0).norm() < 1e-15);
  }
  SUBCASE("zero step size freezes W") {
    DemixingState st = make_demixing_state(3, 1000);
    st.w = gaussian_matrix(3, 2);
    const Matrix w0 = st.w;
    const Vector z{{0.3, -1.2, 0.7}};
    const Vector y = natgrad_step(st, z, 0.0);
    CHECK((y - w0 * z).norm() == 0.0);
    CHECK(st.w == w0);
  }
  SUBCASE("scalar re-evaluation") {
    DemixingState st = make_demixing_state(3, 1000);
    st.w = gaussian_matrix(3, 3);
    const Matrix w0 = st.w;
    const Vector z{{0.4, 1.1, -0.9}};
    const double eta = 5e-3;
    natgrad_step(st, z, eta);
    double y[3];
    for (int i = 0; i < 3; ++i) {
      y[i] = 0.0;
      for (int j = 0; j < 3; ++j) y[i] += w0(i, j) * z(j);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double g = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double bracket = (i == k ? 1.0 : 0.0) - std::tanh(y[i]) * y[k];
          g += bracket * w0(k, j);
        }
        CHECK(std::abs(st.w(i, j) - (w0(i, j) + eta * g)) < 1e-14);
      }
    }
  }
  SUBCASE("non-finite output aborts") {
    DemixingState st = make_demixing_state(2);
    CHECK_THROWS_AS(natgrad_step(st, Vector{{INFINITY, 0.0}}, 0.01), NumericalError);
  }
}

TEST_CASE("orthogonalization cadence") {
  DemixingState st = make_demixing_state(3, 5);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 1; t <= 20; ++t) {
    natgrad_step(st, Vector{{g(rng), g(rng), g(rng)}}, 0.05);
    const double dev = (st.w * st.w.transpose() - Matrix::Identity(3, 3)).norm();
    if (t % 5 == 0) {
      CHECK(dev < 1e-8);
    } else if (t % 5 == 1) {
      CHECK(dev > 1e-8);
    }
  }
  CHECK(st.step_count == 20);
}

TEST_CASE("symmetric_orthogonalize") {
  SUBCASE("orthogonal input is a fixed point") {
    const Matrix q = gaussian_matrix(4, 6).householderQr().householderQ();
    CHECK((symmetric_orthogonalize(q) - q).norm() < 1e-12);
  }
  SUBCASE("scaled identity") {
    CHECK((symmetric_orthogonalize(2.0 * Matrix::Identity(3, 3)) - Matrix::Identity(3, 3))
              .norm() < 1e-15);
  }
  SUBCASE("SVD orthogonal factor oracle") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Matrix w = gaussian_matrix(4, 100 + seed);
      const Matrix o = symmetric_orthogonalize(w);
      Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Matrix oracle = svd.matrixU() * svd.matrixV().transpose();
      CHECK((o * o.transpose() - Matrix::Identity(4, 4)).norm() < 1e-10);
      CHECK((o - oracle).norm() < 1e-8);
      CHECK((symmetric_orthogonalize(o) - o).norm() < 1e-12);
    }
  }
  SUBCASE("rank deficiency is rejected") {
    Matrix w = gaussian_matrix(3, 7);
    w.row(2) = w.row(0);
    CHECK_THROWS_AS(symmetric_orthogonalize(w), NumericalError);
    CHECK_THROWS_AS(symmetric_orthogonalize(Matrix::Zero(3, 3)), NumericalError);
  }
}
