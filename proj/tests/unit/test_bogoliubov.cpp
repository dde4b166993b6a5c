#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "optomod/bogoliubov.hpp"

using namespace optomod;

TEST_SUITE("bogoliubov") {

TEST_CASE("nonlocal detunings") {
  const SystemParams p = fixtures::weak_damping();
  const auto [s3, s4] = nonlocal_detunings(p, TargetAmplitudes(1e4, 5e3, 1e4, 5e3));
  CHECK(s3 == 5.0);
  CHECK(s4 == 1.0);
  // correction (0.07^2 + 0.06^2 - 0.13^2 - 0.12^2) / 2 in coupling units
  const auto [d3, d4] = nonlocal_detunings(p, fixtures::sweep_targets());
  CHECK(d3 == doctest::Approx(5.0 - 0.0114).epsilon(1e-12));
  CHECK(d4 == doctest::Approx(1.0 + 0.0114).epsilon(1e-12));
  SystemParams free = p;
  free.g = 0.0;
  const auto [f3, f4] = nonlocal_detunings(free, fixtures::sweep_targets());
  CHECK(f3 == 5.0);
  CHECK(f4 == 1.0);
}

TEST_CASE("squeezing parameter") {
  CHECK(squeeze_parameter(TargetAmplitudes(1.0, 0.0, 2.0, 0.0)) == 0.0);
  const auto t = fixtures::sweep_targets();
  CHECK(t.ratio() == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(squeeze_parameter(t) == doctest::Approx(1.4722).epsilon(1e-4));
  for (double x : {0.1, 0.5, 0.9, 0.9999}) {
    const TargetAmplitudes tt(1.0, x, 1.0, x);
    CHECK(std::abs(std::tanh(squeeze_parameter(tt)) - x) < 1e-12);
  }
}

TEST_CASE("beam-splitter coupling") {
  const double g = 4e-6;
  const TargetAmplitudes flat(3e4, 0.0, 1e4, 0.0);
  CHECK(effective_coupling_chi(flat, g) == doctest::Approx(g * 4e4 / 2.0).epsilon(1e-14));
  const auto t = fixtures::sweep_targets();
  const double chi = effective_coupling_chi(t, g);
  CHECK(chi == doctest::Approx(std::sqrt(0.2 * 0.2 - 0.18 * 0.18) / (2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(chi == doctest::Approx(0.0308).epsilon(2e-3));
  // chi = (g/2) (A_L0 + A_R0) / cosh r
  CHECK(chi == doctest::Approx(g / 2.0 * (t.a_L0() + t.a_R0()) / std::cosh(squeeze_parameter(t))).epsilon(1e-12));
  double previous = INFINITY;
  for (double s : {0.0, 0.2, 0.5, 0.8}) {
    const double c = effective_coupling_chi(TargetAmplitudes(1e4, s * 1e4, 1e4, s * 1e4), g);
    CHECK(c < previous);
    previous = c;
  }
}

TEST_CASE("optimal modulation frequency") {
  const SystemParams p = fixtures::weak_damping();
  CHECK(optimal_omega(TargetAmplitudes(1e4, 2e3, 1e4, 2e3), p) == 2.0);
  CHECK(optimal_omega(fixtures::sweep_targets(), p) == doctest::Approx(2.0114).epsilon(1e-12));
  // fixed amplitudes, doubled g: fourfold shift
  SystemParams q = p;
  q.g = 2.0 * p.g;
  const auto t = fixtures::sweep_targets();
  CHECK(optimal_omega(t, q) - 2.0 == doctest::Approx(4.0 * (optimal_omega(t, p) - 2.0)).epsilon(1e-12));
}

TEST_CASE("effective model summary") {
  SystemParams p = fixtures::weak_damping();
  const EffectiveModel m = effective_model(p, fixtures::sweep_targets());
  CHECK(m.ratio == doctest::Approx(0.9));
  CHECK(m.r == doctest::Approx(std::atanh(0.9)));
  CHECK(m.chi > 0.0);
  CHECK_FALSE(m.detuning_mismatch);
  CHECK_FALSE(m.near_unit_ratio);
  p.delta_R = 3.5;
  CHECK(effective_model(p, fixtures::sweep_targets()).detuning_mismatch);
  CHECK(effective_model(p, TargetAmplitudes(1.0, 0.9995, 1.0, 0.9995)).near_unit_ratio);
}

}
