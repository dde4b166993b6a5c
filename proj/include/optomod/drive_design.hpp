#pragma once

#include <array>

#include "optomod/meanfield.hpp"
#include "optomod/model.hpp"

namespace optomod {

struct MechanicalMeans {
  double p = 0.0;
  double q = 0.0;
};

/// Drives that realise a prescribed limit cycle of the cavity means.
/// Both drives carry harmonics n in {-1, 0, 1, 2}.
struct DesignedDrives {
  DriveSpec drive_L;
  DriveSpec drive_R;
  TargetAmplitudes targets;
  double omega_mod;
};

struct RoundTripReport {
  double max_rel_error = 0.0;
  int periods_to_converge = 0;
  /// extracted c_0, c_1 for the left and right cavity
  std::array<cplx, 4> extracted{};
};

/// Long-time mechanical means driven by the target cavity orbit.
/// Warns through `low_quality_factor()` only; throws ResonantDenominator
/// when |Omega^2 - omega_m^2| < 1e-9.
MechanicalMeans asymptotic_mech_means(const TargetAmplitudes& targets, const SystemParams& params,
                                      double omega_mod, double t);

/// Full asymptotic mean state: cavity means from the targets plus the
/// mechanical response above.
MeanState asymptotic_means(const TargetAmplitudes& targets, const SystemParams& params,
                           double omega_mod, double t);

DesignedDrives design_drives(const TargetAmplitudes& targets, const SystemParams& params,
                             double omega_mod);

/// design_drives -> integrate_means (cold start, `periods` modulation
/// periods) -> fourier_extract; compares (c_0, c_1) of each cavity with the
/// targets, component by component (relative error).
RoundTripReport verify_roundtrip(const TargetAmplitudes& targets, const SystemParams& params,
                                 double omega_mod, const IntegratorControls& controls = {},
                                 int periods = 400, double convergence_threshold = 1e-3);

}  // namespace optomod
