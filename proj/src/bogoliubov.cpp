#include "optomod/bogoliubov.hpp"

#include <cmath>

namespace optomod {

namespace {

void check_ratio(double ratio) {
  if (!(ratio < 1.0)) throw Error(ErrorKind::UnstableRatio, "(A_L1 + A_R1) / (A_L0 + A_R0) >= 1");
}

}  // namespace

std::pair<double, double> nonlocal_detunings(const SystemParams& p, const TargetAmplitudes& tg) {
  const double shift = p.g * p.g * tg.power_imbalance() / p.omega_m;
  return {p.delta_L + p.J + shift, p.delta_R - p.J - shift};
}

double squeeze_parameter(const TargetAmplitudes& tg) {
  const double ratio = tg.ratio();
  check_ratio(ratio);
  return std::atanh(ratio);
}

double effective_coupling_chi(const TargetAmplitudes& tg, double g) {
  const double s0 = tg.a_L0() + tg.a_R0();
  const double s1 = tg.a_L1() + tg.a_R1();
  check_ratio(s1 / s0);
  return g * std::sqrt(s0 * s0 - s1 * s1) / 2.0;
}

double optimal_omega(const TargetAmplitudes& tg, const SystemParams& p) {
  return 2.0 * p.omega_m - p.g * p.g * tg.power_imbalance() / p.omega_m;
}

EffectiveModel effective_model(const SystemParams& p, const TargetAmplitudes& tg) {
  EffectiveModel m;
  std::tie(m.delta3, m.delta4) = nonlocal_detunings(p, tg);
  m.ratio = tg.ratio();
  m.r = squeeze_parameter(tg);
  m.chi = effective_coupling_chi(tg, p.g);
  m.omega_opt = optimal_omega(tg, p);
  m.detuning_mismatch = p.delta_L != p.delta_R;
  m.near_unit_ratio = m.ratio > 0.999;
  return m;
}

}  // namespace optomod
