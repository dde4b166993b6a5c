#include <doctest.h>

#include <cmath>
#include <memory>

#include "fixtures.hpp"

using namespace optomod;

namespace {

MeanSeries synthetic(double omega, int periods, int spp, cplx a0, cplx a1) {
  MeanSeries s;
  s.omega_mod = omega;
  const double h = fixtures::tau(omega) / spp;
  for (int k = 0; k <= periods * spp; ++k) {
    MeanState m;
    m.t = k * h;
    m.a_L = a0 + a1 * std::exp(cplx(0.0, -omega * m.t));
    m.a_R = m.a_L;
    m.q = std::cos(omega * m.t) + 0.25;
    s.times.push_back(m.t);
    s.states.push_back(m);
    s.rates.push_back(MeanState{});
  }
  return s;
}

double final_distance(const MeanSeries& a, const MeanSeries& b) {
  const MeanState& x = a.states.back();
  const MeanState& y = b.states.back();
  return std::abs(x.a_L - y.a_L) + std::abs(x.a_R - y.a_R) + std::abs(x.q - y.q) +
         std::abs(x.p - y.p);
}

}  // namespace

TEST_SUITE("meanfield") {

TEST_CASE("rhs: origin is a fixed point") {
  const MeanState d = mean_rhs(MeanState{}, fixtures::weak_damping(), fixtures::zero_drive(),
                               fixtures::zero_drive(), 0.7);
  CHECK(d.q == cplx(0.0));
  CHECK(d.p == cplx(0.0));
  CHECK(d.a_L == cplx(0.0));
  CHECK(d.a_R == cplx(0.0));
}

TEST_CASE("rhs: linear terms by hand") {
  SystemParams p = fixtures::weak_damping();
  p.g = 0.0;
  MeanState s;
  s.a_L = 1.0;
  const MeanState d = mean_rhs(s, p, fixtures::zero_drive(), fixtures::zero_drive(), 0.0);
  CHECK(std::abs(d.a_L - cplx(-0.1, -3.0)) < 1e-15);
  CHECK(std::abs(d.a_R - cplx(0.0, -2.0)) < 1e-15);
}

TEST_CASE("rhs: radiation pressure uses conj(A) A and cancels for equal cavities") {
  SystemParams p = fixtures::weak_damping();
  p.g = 0.5;
  MeanState s;
  s.a_L = cplx(1.0, 2.0);
  s.a_R = s.a_L;
  CHECK(mean_rhs(s, p, fixtures::zero_drive(), fixtures::zero_drive(), 0.0).p == cplx(0.0));
  s.a_R = 0.0;
  // -g |A_L|^2 = -0.5 * 5
  CHECK(std::abs(mean_rhs(s, p, fixtures::zero_drive(), fixtures::zero_drive(), 0.0).p -
                 cplx(-2.5, 0.0)) < 1e-15);
}

TEST_CASE("zero drives keep the origin") {
  const MeanSeries s = integrate_means(fixtures::weak_damping(), fixtures::zero_drive(),
                                       fixtures::zero_drive(), MeanState{}, 10.0);
  for (const auto& m : s.states) {
    CHECK(std::abs(m.a_L) == 0.0);
    CHECK(std::abs(m.q) == 0.0);
  }
}

TEST_CASE("constant symmetric drive without coupling relaxes to E0/(kappa + i(delta + J))") {
  SystemParams p = fixtures::weak_damping();
  p.g = 0.0;
  const MeanSeries s = integrate_means(p, fixtures::static_drive(), fixtures::static_drive(),
                                       MeanState{}, 80.0 * fixtures::tau(2.0));
  const cplx expected = 7e4 / cplx(0.1, 5.0);
  CHECK(expected.real() == doctest::Approx(279.9).epsilon(1e-4));
  CHECK(expected.imag() == doctest::Approx(-13994.4).epsilon(1e-6));
  CHECK(std::abs(s.states.back().a_L - expected) < 1e-6 * std::abs(expected));
  CHECK(std::abs(s.states.back().a_R - expected) < 1e-6 * std::abs(expected));
}

TEST_CASE("symmetric scenario collapses and stays real") {
  const MeanSeries s = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                       fixtures::symmetric_drive(), MeanState{},
                                       5.0 * fixtures::tau(2.0));
  for (const auto& m : s.states) {
    CHECK(m.a_L == m.a_R);
    CHECK(m.q == cplx(0.0));
    CHECK(m.p == cplx(0.0));
  }
}

TEST_CASE("real drives keep <Q>, <P> real under asymmetric driving") {
  const IntegratorControls c;
  const MeanSeries s = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                       fixtures::static_drive(), MeanState{},
                                       20.0 * fixtures::tau(2.0), c);
  double imag = 0.0, scale = 0.0;
  for (const auto& m : s.states) {
    imag = std::max({imag, std::abs(m.q.imag()), std::abs(m.p.imag())});
    scale = std::max(scale, std::abs(m.q));
  }
  CHECK(scale > 1.0);
  CHECK(imag < 100.0 * c.abs_tol * std::max(1.0, scale));
}

TEST_CASE("fixed-step RK4 halving ratio is about 16") {
  IntegratorControls c;
  c.samples_per_period = 4;
  const double t_end = 2.0 * fixtures::tau(2.0);
  const double span = fixtures::tau(2.0) / 4;
  MeanSeries runs[3];
  for (int k = 0; k < 3; ++k) {
    c.fixed_step = span / (16 << k);
    runs[k] = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                              fixtures::static_drive(), MeanState{}, t_end, c);
  }
  const double ratio = final_distance(runs[0], runs[1]) / final_distance(runs[1], runs[2]);
  MESSAGE("step-halving ratio " << ratio);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("fixed-step runs are reproducible bit for bit") {
  IntegratorControls c;
  c.fixed_step = 0.005;
  const auto a = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                 fixtures::static_drive(), MeanState{}, 3.0, c);
  const auto b = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                 fixtures::static_drive(), MeanState{}, 3.0, c);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.states[k].a_L == b.states[k].a_L);
}

TEST_CASE("divergence bound") {
  IntegratorControls c;
  c.max_magnitude = 1e3;
  CHECK_THROWS_AS(integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                  fixtures::symmetric_drive(), MeanState{}, 10.0, c),
                  Error);
}

TEST_CASE("limit-cycle detection on an exactly periodic input") {
  const MeanSeries s = synthetic(2.0, 4, 64, 1.0, 0.5);
  const ConvergenceReport r = detect_limit_cycle(s, 2.0, 1e-3);
  CHECK(r.converged);
  CHECK(r.periods_needed == 1);
  CHECK(r.final_residual < 1e-12);
  CHECK_THROWS_AS(detect_limit_cycle(synthetic(2.0, 1, 64, 1.0, 0.5), 2.0, 1e-3), Error);
}

TEST_CASE("limit-cycle detection on a decaying transient") {
  MeanSeries s = synthetic(2.0, 30, 64, 1.0, 0.5);
  for (auto& m : s.states) m.a_L += std::exp(-0.5 * m.t);
  const ConvergenceReport r = detect_limit_cycle(s, 2.0, 1e-3, kCavityMeanVariables);
  // period-to-period change exp(-0.5 t_k) (1 - exp(-pi/2)) relative to ~1.5
  int expected = 1;
  while (std::exp(-0.5 * (expected - 1) * std::numbers::pi) * (1.0 - std::exp(-0.5 * std::numbers::pi)) /
             1.5 >=
         1e-3)
    ++expected;
  CHECK(r.converged);
  CHECK(std::abs(r.periods_needed - expected) <= 1);
}

TEST_CASE("Fourier extraction of a known orbit") {
  const MeanSeries s = synthetic(2.0, 3, 64, cplx(1.0, 0.2), cplx(0.5, -0.1));
  const HarmonicContent h = fourier_extract(s, 2.0, 2);
  const auto& aL = h[static_cast<int>(MeanVariable::AL)];
  CHECK(std::abs(aL.at(0) - cplx(1.0, 0.2)) < 1e-12);
  CHECK(std::abs(aL.at(1) - cplx(0.5, -0.1)) < 1e-12);
  CHECK(std::abs(aL.at(-1)) < 1e-10);
  CHECK(std::abs(aL.at(2)) < 1e-10);
  const auto& q = h[static_cast<int>(MeanVariable::Q)];
  CHECK(std::abs(q.at(-1) - std::conj(q.at(1))) < 1e-10);
  CHECK(std::abs(q.at(1) - 0.5) < 1e-12);
}

TEST_CASE("cubic interpolation of the sampled trajectory") {
  const MeanSeries s = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                       fixtures::static_drive(), MeanState{}, 4.0);
  IntegratorControls dense;
  dense.samples_per_period = 4096;
  const MeanSeries d = integrate_means(fixtures::weak_damping(), fixtures::symmetric_drive(),
                                       fixtures::static_drive(), MeanState{}, 4.0, dense);
  const std::size_t k = d.size() / 3 + 5;
  const MeanState m = s.interpolate(d.times[k]);
  CHECK(std::abs(m.a_L - d.states[k].a_L) < 1e-5 * std::abs(d.states[k].a_L));
}

}
