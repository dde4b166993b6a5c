#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "optomod/meanfield.hpp"
#include "optomod/model.hpp"

namespace optomod {

/// Supplies the classical means that enter the drift matrix at time t.
using MeanSource = std::function<MeanState(double)>;

/// Mode (a): cubic Hermite interpolation of an integrated mean series.
MeanSource series_source(std::shared_ptr<const MeanSeries> series);
/// Mode (b): analytic asymptotic orbit of prescribed target amplitudes.
MeanSource asymptotic_source(const TargetAmplitudes& targets, const SystemParams& params,
                             double omega_mod);

struct CovSeries {
  std::vector<double> times;
  std::vector<CovMatrix> matrices;

  std::size_t size() const { return times.size(); }
};

struct StabilityReport {
  double max_real_eig = 0.0;
  bool stable = false;
  double worst_t = 0.0;
  std::vector<double> times;
  std::vector<double> max_real;  ///< spectral abscissa of R(t) per sample
};

/// Floquet multipliers of u' = R(t) u over one modulation period.
struct FloquetReport {
  Eigen::VectorXcd multipliers;
  double spectral_radius = 0.0;
  /// max Re of the Floquet exponents ln|mu| / tau
  double max_exponent = 0.0;
  bool stable = false;
};

/// Outcome of integrating the covariance equation until it repeats with
/// the modulation period.
struct PeriodicCovOrbit {
  CovSeries tail;          ///< final `keep_periods` periods (inclusive endpoints)
  CovMatrix final_sigma;
  int periods = 0;         ///< periods integrated
  double residual = 0.0;   ///< last period-to-period sup distance / sup |sigma|
  bool converged = false;
};

std::pair<double, double> effective_detunings(const SystemParams& params, double q_mean);

/// G_j = sqrt(2) g <A_j>
std::pair<cplx, cplx> effective_couplings(const SystemParams& params, cplx a_L, cplx a_R);

/// Drift matrix in quadrature order (q, p, x_L, y_L, x_R, y_R). Throws
/// NonRealMean when |Im <Q>| exceeds imag_tol * max(1, |Re <Q>|).
Mat6 drift_matrix(const SystemParams& params, const MeanState& mean, double imag_tol = 1e-6);

/// diag(0, gamma_m (2 n_m + 1), kappa (2 n_a + 1) x4)
Mat6 diffusion_matrix(const SystemParams& params);

/// Integrates sigma' = R sigma + sigma R^T + D from t0 to t_end on a grid of
/// controls.samples_per_period points per period. The state is stored as the
/// 21 independent entries, so every output is exactly symmetric.
/// Throws Diverged or StepSizeUnderflow.
CovSeries integrate_cm(const SystemParams& params, const MeanSource& means, double omega_mod,
                       const CovMatrix& sigma0, double t0, double t_end,
                       const IntegratorControls& controls = {});

/// Integrates period by period until the sup distance between consecutive
/// periods falls below tol * sup |sigma|, or max_periods is reached.
PeriodicCovOrbit integrate_cm_to_periodic(const SystemParams& params, const MeanSource& means,
                                          double omega_mod, const CovMatrix& sigma0, double t0,
                                          int max_periods, double tol,
                                          const IntegratorControls& controls = {},
                                          int keep_periods = 2, int min_periods = 2);

/// Eigenvalues of R(t) on n_samples uniform points of [t0, t0 + tau).
/// Throws Validation if n_samples < 32, EigenFailure if the solver fails.
StabilityReport stability_scan(const SystemParams& params, const MeanSource& means,
                               double omega_mod, int n_samples, double t0);

/// Monodromy of the fluctuation drift over [t0, t0 + tau]. Unlike the
/// pointwise scan this detects parametric instabilities of the periodic
/// system. Throws EigenFailure if the multipliers cannot be computed.
FloquetReport floquet_analysis(const SystemParams& params, const MeanSource& means,
                               double omega_mod, double t0,
                               const IntegratorControls& controls = {});

}  // namespace optomod
