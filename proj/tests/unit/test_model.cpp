#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"

using namespace optomod;

TEST_SUITE("model") {

TEST_CASE("period of the modulation") {
  CHECK(DriveSpec(2.0, {}).period() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(period(DriveSpec(2.0 * std::numbers::pi, {})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(period(DriveSpec(1.97, {})) == doctest::Approx(3.18943).epsilon(1e-5));
}

TEST_CASE("drive evaluation") {
  const DriveSpec d = fixtures::symmetric_drive();
  CHECK(std::abs(drive_eval(d, 0.0) - cplx(1.4e5, 0.0)) < 1e-9);
  CHECK(std::abs(drive_eval(d, std::numbers::pi / 2.0)) < 1e-9);
  CHECK(drive_eval(fixtures::zero_drive(), 1.234) == cplx(0.0, 0.0));

  // n = +1 is the exp(-i Omega t) sideband
  const DriveSpec one(2.0, {{1, 1.0}});
  CHECK(std::abs(one(0.3) - std::exp(cplx(0.0, -0.6))) < 1e-15);
}

TEST_CASE("drive is periodic and real for conjugate-symmetric harmonics") {
  const DriveSpec d(1.97, {{0, 2.0}, {1, cplx(1.0, 0.5)}, {-1, cplx(1.0, -0.5)}, {2, cplx(0.0, 0.3)},
                          {-2, cplx(0.0, -0.3)}});
  double max_e = 0.0, max_jump = 0.0, max_imag = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double t = 0.037 * k;
    max_e = std::max(max_e, std::abs(d(t)));
    max_jump = std::max(max_jump, std::abs(d(t + d.period()) - d(t)));
    max_imag = std::max(max_imag, std::abs(d(t).imag()));
  }
  CHECK(max_jump < 1e-12 * max_e);
  CHECK(max_imag < 1e-12 * max_e);
}

TEST_CASE("parameter validation") {
  SystemParams p = fixtures::weak_damping();
  CHECK_NOTHROW(p.validate());
  CHECK_FALSE(p.low_quality_factor());
  p.gamma_m = 0.2;
  CHECK(p.low_quality_factor());
  p.kappa = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = fixtures::weak_damping();
  p.omega_m = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = fixtures::weak_damping();
  p.n_bar_m = -0.1;
  CHECK_THROWS_AS(p.validate(), Error);
  CHECK_THROWS_AS(DriveSpec(0.0, {}), Error);
}

TEST_CASE("targets enforce the stability inequality") {
  CHECK_NOTHROW(TargetAmplitudes(1.0, 0.4, 0.8, 0.2));
  try {
    TargetAmplitudes(1.0, 1.5, 1.0, 0.5);
    FAIL("accepted an unstable target set");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()).find("a_L1 + a_R1 < a_L0 + a_R0") != std::string::npos);
  }
  CHECK_THROWS_AS(TargetAmplitudes(1.0, 0.5, 1.0, 1.5), Error);
  CHECK_THROWS_AS(TargetAmplitudes(-1.0, 0.0, 1.0, 0.0), Error);

  const auto t = fixtures::roundtrip_targets();
  CHECK(t.a_L0() == doctest::Approx(0.1 / (std::sqrt(2.0) * 4e-6)));
  CHECK(t.ratio() == doctest::Approx(0.06 / 0.18));
  CHECK(t.mirrored().a_L0() == t.a_R0());
}

TEST_CASE("covariance presets") {
  const CovMatrix v = CovMatrix::vacuum();
  CHECK(v.entries.isApprox(0.5 * Mat6::Identity()));
  const CovMatrix th = CovMatrix::thermal(1.0, 0.25);
  CHECK(th(0, 0) == 1.5);
  CHECK(th(1, 1) == 1.5);
  CHECK(th(2, 2) == 0.75);
  CHECK(th(5, 5) == 0.75);
  CHECK(th.asymmetry() == 0.0);
}

}
