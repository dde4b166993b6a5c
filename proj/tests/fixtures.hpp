#pragma once

#include <cmath>

#include "optomod/drive_design.hpp"
#include "optomod/meanfield.hpp"
#include "optomod/model.hpp"

namespace fixtures {

using namespace optomod;

inline SystemParams weak_damping() {
  SystemParams p;
  p.kappa = 0.1;
  p.gamma_m = 0.001;
  p.J = 2.0;
  p.delta_L = p.delta_R = 3.0;
  p.g = 4e-6;
  return p;
}

// cavity-dominated losses, used for the entanglement runs
inline SystemParams strong_damping() {
  SystemParams p = weak_damping();
  p.kappa = 0.001;
  p.gamma_m = 0.1;
  return p;
}

inline DriveSpec symmetric_drive(double omega = 2.0) {
  return DriveSpec(omega, {{0, 7e4}, {1, 3.5e4}, {-1, 3.5e4}});
}

inline DriveSpec static_drive(double omega = 2.0) { return DriveSpec(omega, {{0, 7e4}}); }

inline DriveSpec zero_drive(double omega = 2.0) { return DriveSpec(omega, {}); }

inline TargetAmplitudes roundtrip_targets(double g = 4e-6) {
  return TargetAmplitudes::from_couplings(0.1, 0.04, 0.08, 0.02, g);
}

inline TargetAmplitudes sweep_targets(double g = 4e-6) {
  return TargetAmplitudes::from_couplings(0.13, 0.12, 0.07, 0.06, g);
}

inline double tau(double omega) { return 2.0 * std::acos(-1.0) / omega; }

}  // namespace fixtures
