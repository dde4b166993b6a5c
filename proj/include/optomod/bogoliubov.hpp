#pragma once

#include <utility>

#include "optomod/model.hpp"

namespace optomod {

/// Scalar quantities of the rotating-wave effective model built on the
/// nonlocal modes c_{1,2} = (a_L +- a_R)/sqrt(2).
struct EffectiveModel {
  double delta3 = 0.0;  ///< detuning of c_1
  double delta4 = 0.0;  ///< detuning of c_2
  double r = 0.0;       ///< Bogoliubov squeezing parameter
  double chi = 0.0;     ///< beam-splitter coupling
  double omega_opt = 0.0;
  double ratio = 0.0;   ///< (A_L1 + A_R1) / (A_L0 + A_R0)
  bool detuning_mismatch = false;  ///< delta_L != delta_R; formulas assume equality
  bool near_unit_ratio = false;    ///< ratio > 0.999, i.e. r > atanh(0.999)
};

/// (Delta_3, Delta_4); the fast e^{+-i Omega t} parts are dropped.
std::pair<double, double> nonlocal_detunings(const SystemParams& params,
                                             const TargetAmplitudes& targets);

/// r = atanh(ratio). Throws UnstableRatio when ratio >= 1.
double squeeze_parameter(const TargetAmplitudes& targets);

/// chi = g sqrt((A_L0 + A_R0)^2 - (A_L1 + A_R1)^2) / 2
double effective_coupling_chi(const TargetAmplitudes& targets, double g);

/// Omega_opt = 2 omega_m - g^2 (A_R0^2 + A_R1^2 - A_L0^2 - A_L1^2) / omega_m
double optimal_omega(const TargetAmplitudes& targets, const SystemParams& params);

EffectiveModel effective_model(const SystemParams& params, const TargetAmplitudes& targets);

}  // namespace optomod
