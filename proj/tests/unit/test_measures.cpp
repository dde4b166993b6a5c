#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "optomod/fluctuations.hpp"
#include "optomod/measures.hpp"

using namespace optomod;

namespace {

Mat4 tms(double r) {
  Mat4 s = Mat4::Zero();
  const double c = std::cosh(2.0 * r) / 2.0, h = std::sinh(2.0 * r) / 2.0;
  s.diagonal().setConstant(c);
  s(0, 2) = s(2, 0) = h;
  s(1, 3) = s(3, 1) = -h;
  return s;
}

// Brute force: flip the momentum of mode 2, take the moduli of the
// eigenvalues of i Omega sigma, keep the smallest.
double en_by_partial_transpose(const Mat4& s) {
  Mat4 P = Mat4::Identity();
  P(3, 3) = -1.0;
  const Mat4 pt = P * s * P;
  Mat4 W = Mat4::Zero();
  W(0, 1) = W(2, 3) = 1.0;
  W(1, 0) = W(3, 2) = -1.0;
  const Eigen::Matrix4cd M = std::complex<double>(0.0, 1.0) * (W * pt).cast<std::complex<double>>();
  const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(M);
  double nu = INFINITY;
  for (int k = 0; k < 4; ++k) nu = std::min(nu, std::abs(es.eigenvalues()[k]));
  return std::max(0.0, -std::log(2.0 * nu));
}

Mat2 rotation(double a) {
  Mat2 r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("position variance") {
  CHECK(position_variance(CovMatrix::vacuum()) == 0.5);
  CHECK(position_variance(CovMatrix::thermal(1.0, 0.0)) == 1.5);
}

TEST_CASE("reduced covariance blocks") {
  CovMatrix s;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) s.entries(i, j) = 10 * i + j + (i == j ? 100 : 0);
  s.symmetrize();
  const Mat4 lr = reduced_cm(s, Subsystem::L, Subsystem::R);
  CHECK(lr.topLeftCorner<2, 2>() == s.entries.block<2, 2>(2, 2));
  CHECK(lr.bottomRightCorner<2, 2>() == s.entries.block<2, 2>(4, 4));
  CHECK(lr.topRightCorner<2, 2>() == s.entries.block<2, 2>(2, 4));
  const Mat4 ml = reduced_cm(s, Subsystem::M, Subsystem::L);
  CHECK(ml.topRightCorner<2, 2>() == s.entries.block<2, 2>(0, 2));

  // re-embedding reproduces the blocks
  CovMatrix back = CovMatrix::vacuum();
  back.entries.block<2, 2>(2, 2) = lr.topLeftCorner<2, 2>();
  back.entries.block<2, 2>(4, 4) = lr.bottomRightCorner<2, 2>();
  back.entries.block<2, 2>(2, 4) = lr.topRightCorner<2, 2>();
  back.entries.block<2, 2>(4, 2) = lr.bottomLeftCorner<2, 2>();
  CHECK(reduced_cm(back, Subsystem::L, Subsystem::R) == lr);

  CHECK(reduced_cm(CovMatrix::thermal(1, 2), Subsystem::L, Subsystem::R).topRightCorner<2, 2>().isZero());
}

TEST_CASE("vacuum and product states carry no entanglement") {
  CHECK(log_negativity(0.5 * Mat4::Identity()) == 0.0);
  Mat4 prod = Mat4::Zero();
  prod.topLeftCorner<2, 2>() << 2.0, 0.3, 0.3, 0.8;
  prod.bottomRightCorner<2, 2>() << 0.6, -0.1, -0.1, 0.9;
  CHECK(log_negativity(prod) == 0.0);
}

TEST_CASE("two-mode squeezed states: E_N = 2r") {
  for (double r : {0.1, 0.5, 1.0, 1.5}) {
    CHECK(std::abs(log_negativity(tms(r)) - 2.0 * r) < 1e-8);
    CHECK(std::abs(en_by_partial_transpose(tms(r)) - 2.0 * r) < 1e-8);
  }
  CHECK(std::abs(log_negativity(tms(0.5)) - 1.0) < 1e-10);
}

TEST_CASE("E_N agrees with the partial-transpose oracle on asymmetric states") {
  std::mt19937 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    // random Gaussian state: S diag(n) S^T from local, beam-splitter and
    // two-mode squeezing maps
    auto local = [&] {
      Mat4 L = Mat4::Zero();
      for (int m = 0; m < 2; ++m) {
        Mat2 sq = Mat2::Zero();
        sq(0, 0) = std::exp(0.4 * n(rng));
        sq(1, 1) = 1.0 / sq(0, 0);
        L.block<2, 2>(2 * m, 2 * m) = rotation(n(rng)) * sq;
      }
      return L;
    };
    const double r = 0.6 * std::abs(n(rng)), phi = n(rng);
    Mat4 T = Mat4::Zero(), B = Mat4::Zero();
    T.diagonal().setConstant(std::cosh(r));
    T(0, 2) = T(2, 0) = std::sinh(r);
    T(1, 3) = T(3, 1) = -std::sinh(r);
    B.diagonal().setConstant(std::cos(phi));
    B(0, 2) = B(1, 3) = std::sin(phi);
    B(2, 0) = B(3, 1) = -std::sin(phi);
    const Mat4 S = local() * T * B * local();
    Mat4 th = Mat4::Zero();
    th.diagonal() << 0.5, 0.5, 0.5 + 0.3 * std::abs(n(rng)), 0.5 + 0.3 * std::abs(n(rng));
    th(1, 1) = th(0, 0);
    th(3, 3) = th(2, 2);
    const Mat4 s = S * th * S.transpose();
    const double oracle = en_by_partial_transpose(s);
    if (oracle <= 1e-3) continue;
    ++checked;
    CHECK(std::abs(log_negativity(s) - oracle) < 1e-8 * std::max(1.0, oracle));
  }
  CHECK(checked >= 20);
}

TEST_CASE("E_N is invariant under local symplectic maps") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Mat4 s0 = tms(0.7);
  for (int trial = 0; trial < 20; ++trial) {
    Mat4 S = Mat4::Zero();
    Mat2 sq1 = Mat2::Zero(), sq2 = Mat2::Zero();
    sq1.diagonal() << std::exp(0.5 * u(rng)), std::exp(-0.5 * u(rng));
    sq1(1, 1) = 1.0 / sq1(0, 0);
    sq2.diagonal() << std::exp(0.5 * u(rng)), 1.0;
    sq2(1, 1) = 1.0 / sq2(0, 0);
    S.topLeftCorner<2, 2>() = rotation(3 * u(rng)) * sq1;
    S.bottomRightCorner<2, 2>() = rotation(3 * u(rng)) * sq2 * rotation(u(rng));
    const Mat4 s = S * s0 * S.transpose();
    CHECK(std::abs(log_negativity(s) - 1.4) < 1e-8);
  }
}

TEST_CASE("unphysical input is rejected") {
  Mat4 bad = 0.5 * Mat4::Identity();
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(log_negativity(bad), Error);
}

TEST_CASE("symplectic eigenvalues") {
  const Eigen::VectorXd v = symplectic_eigenvalues(CovMatrix::thermal(1.0, 0.25).entries);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.75));
  CHECK(v[1] == doctest::Approx(0.75));
  CHECK(v[2] == doctest::Approx(1.5));
  const Eigen::VectorXd t = symplectic_eigenvalues(tms(0.9));
  CHECK(t[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("uncertainty bound holds on physical states") {
  const Mat4 s = tms(1.2);
  CHECK(s(0, 0) * s(1, 1) >= 0.25);
}

TEST_CASE("periodic extrema") {
  const double W = 2.0, tau = fixtures::tau(W);
  std::vector<double> t, c, y;
  for (int k = 0; k <= 3 * 256; ++k) {
    t.push_back(k * tau / 256);
    c.push_back(0.7);
    y.push_back(1.0 + 0.3 * std::cos(W * t.back() + 0.123));
  }
  const Extrema ec = periodic_extrema(t, c, W);
  CHECK(ec.min == 0.7);
  CHECK(ec.max == 0.7);
  const Extrema ey = periodic_extrema(t, y, W);
  CHECK(std::abs(ey.min - 0.7) < 1e-6);
  CHECK(std::abs(ey.max - 1.3) < 1e-6);

  std::vector<double> drifting = y;
  for (std::size_t k = 0; k < drifting.size(); ++k) drifting[k] += 0.01 * t[k];
  CHECK_THROWS_AS(periodic_extrema(t, drifting, W, 1e-4), Error);
  CHECK_THROWS_AS(periodic_extrema(std::span(t).first(100), std::span(y).first(100), W), Error);
}

TEST_CASE("sweep quantity names") {
  CHECK(parse_sweep_quantity("sigma11_min") == SweepQuantity::Sigma11Min);
  CHECK(parse_sweep_quantity("en_max") == SweepQuantity::ENMax);
  CHECK_THROWS_AS(parse_sweep_quantity("nope"), Error);
}

TEST_CASE("single sweep point equals the direct pipeline") {
  SweepScenario sc;
  sc.params = fixtures::weak_damping();
  sc.targets = fixtures::sweep_targets();
  const SweepRow row = sweep_point(2.0, sc);
  REQUIRE(row.error.empty());
  CHECK(row.stable);

  const MeanSource src = asymptotic_source(*sc.targets, sc.params, 2.0);
  const auto orbit = integrate_cm_to_periodic(sc.params, src, 2.0, CovMatrix::thermal(0, 0), 0.0, 600, 1e-5);
  const auto e = periodic_extrema(orbit.tail.times, position_variance_series(orbit.tail), 2.0, 1e-4);
  const auto n = periodic_extrema(orbit.tail.times,
                                  log_negativity_series(orbit.tail, Subsystem::L, Subsystem::R), 2.0, 1e-4);
  CHECK(row.sigma11_min == e.min);
  CHECK(row.en_max == n.max);

  const auto rows = sweep_omega({2.0}, sc, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].sigma11_min == row.sigma11_min);
}

TEST_CASE("far from resonance squeezing is lost") {
  SweepScenario sc;
  sc.params = fixtures::weak_damping();
  sc.targets = fixtures::sweep_targets();
  const SweepRow row = sweep_point(3.0, sc);
  INFO(row.error);
  CHECK(row.stable);
  CHECK(row.sigma11_min > 0.4);
}

TEST_CASE("sweep order does not depend on workers") {
  SweepScenario sc;
  sc.params = fixtures::weak_damping();
  sc.targets = fixtures::sweep_targets();
  const std::vector<double> grid{2.1, 1.9, 2.05, 3.0};
  const auto a = sweep_omega(grid, sc, 1);
  const auto b = sweep_omega(grid, sc, 4);
  REQUIRE(a.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(a[k].omega_mod == grid[k]);
    CHECK(b[k].omega_mod == grid[k]);
    CHECK(a[k].stable == b[k].stable);
    if (a[k].stable) CHECK(a[k].sigma11_min == b[k].sigma11_min);
  }
}

TEST_CASE("unstable points are flagged, not fatal") {
  SweepScenario sc;
  sc.params = fixtures::weak_damping();
  sc.targets = fixtures::sweep_targets();
  const auto rows = sweep_omega({1.9, 2.0}, sc, 2);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].stable);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(std::isnan(rows[0].sigma11_min));
  CHECK(rows[1].stable);
}

}
