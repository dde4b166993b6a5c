#include "optomod/drive_design.hpp"

#include <algorithm>
#include <cmath>

namespace optomod {

namespace {

constexpr cplx I{0.0, 1.0};

// 1 - Omega^2 / (Omega^2 - omega_m^2), the off-resonant mechanical factor
double mech_factor(const SystemParams& p, double W) {
  const double d = W * W - p.omega_m * p.omega_m;
  if (std::abs(d) < 1e-9)
    throw Error(ErrorKind::ResonantDenominator, "modulation frequency resonant with omega_m");
  return 1.0 - W * W / d;
}

}  // namespace

MechanicalMeans asymptotic_mech_means(const TargetAmplitudes& tg, const SystemParams& p,
                                      double W, double t) {
  const double factor = mech_factor(p, W);
  const double beat = tg.beat_imbalance();
  // i X (e^{-iWt} - e^{iWt}) = 2 X sin(Wt);  e^{-iWt} + e^{iWt} = 2 cos(Wt)
  MechanicalMeans m;
  m.p = 2.0 * p.g * W * beat / (W * W - p.omega_m * p.omega_m) * std::sin(W * t);
  m.q = p.g * tg.power_imbalance() / p.omega_m +
        p.g * beat / p.omega_m * factor * 2.0 * std::cos(W * t);
  return m;
}

MeanState asymptotic_means(const TargetAmplitudes& tg, const SystemParams& p, double W,
                           double t) {
  const auto mech = asymptotic_mech_means(tg, p, W, t);
  const cplx side = std::polar(1.0, -W * t);
  return {t, mech.q, mech.p, tg.a_L0() + tg.a_L1() * side, tg.a_R0() + tg.a_R1() * side};
}

DesignedDrives design_drives(const TargetAmplitudes& tg, const SystemParams& p, double W) {
  p.validate();
  if (!(W > 0.0)) throw Error(ErrorKind::Validation, "omega_mod must be > 0");
  const double factor = mech_factor(p, W);
  const double g2 = p.g * p.g / p.omega_m;
  const double power = tg.power_imbalance();
  const double beat = tg.beat_imbalance() * factor;
  const double L0 = tg.a_L0(), L1 = tg.a_L1(), R0 = tg.a_R0(), R1 = tg.a_R1();

  std::map<int, cplx> left{
      {0, (p.kappa + I * p.delta_L) * L0 + I * p.J * R0 + I * g2 * L0 * power + I * g2 * L1 * beat},
      {1, cplx{p.kappa, p.delta_L - W} * L1 + I * p.J * R1 + I * g2 * L1 * power +
              I * g2 * L0 * beat},
      {-1, I * g2 * L0 * beat},
      {2, I * g2 * L1 * beat},
  };
  std::map<int, cplx> right{
      {0, (p.kappa + I * p.delta_R) * R0 + I * p.J * L0 - I * g2 * R0 * power - I * g2 * R1 * beat},
      {1, cplx{p.kappa, p.delta_R - W} * R1 + I * p.J * L1 - I * g2 * R1 * power -
              I * g2 * R0 * beat},
      {-1, -I * g2 * R0 * beat},
      {2, -I * g2 * R1 * beat},
  };
  return {DriveSpec(W, std::move(left)), DriveSpec(W, std::move(right)), tg, W};
}

RoundTripReport verify_roundtrip(const TargetAmplitudes& tg, const SystemParams& p, double W,
                                 const IntegratorControls& controls, int periods,
                                 double convergence_threshold) {
  const auto drives = design_drives(tg, p, W);
  const double tau = drives.drive_L.period();
  const auto series =
      integrate_means(p, drives.drive_L, drives.drive_R, MeanState{}, periods * tau, controls);
  const auto conv = detect_limit_cycle(series, W, convergence_threshold, kCavityMeanVariables);
  const auto h = fourier_extract(series, W, 2);

  RoundTripReport r;
  r.periods_to_converge = conv.converged ? conv.periods_needed : -1;
  const auto& aL = h[static_cast<int>(MeanVariable::AL)];
  const auto& aR = h[static_cast<int>(MeanVariable::AR)];
  r.extracted = {aL.at(0), aL.at(1), aR.at(0), aR.at(1)};
  const std::array<double, 4> want{tg.a_L0(), tg.a_L1(), tg.a_R0(), tg.a_R1()};
  // zero sidebands are compared against the carrier of the same cavity
  const std::array<double, 4> carrier{tg.a_L0(), tg.a_L0(), tg.a_R0(), tg.a_R0()};
  for (std::size_t k = 0; k < 4; ++k) {
    const double s = want[k] > 0.0 ? want[k] : (carrier[k] > 0.0 ? carrier[k] : 1.0);
    r.max_rel_error = std::max(r.max_rel_error, std::abs(r.extracted[k] - want[k]) / s);
  }
  return r;
}

}  // namespace optomod
