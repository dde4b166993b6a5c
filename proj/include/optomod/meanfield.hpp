#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "optomod/model.hpp"
#include "optomod/ode.hpp"

namespace optomod {

enum class MeanVariable { Q = 0, P = 1, AL = 2, AR = 3 };

inline constexpr std::array<MeanVariable, 4> kAllMeanVariables{MeanVariable::Q, MeanVariable::P,
                                                               MeanVariable::AL, MeanVariable::AR};
inline constexpr std::array<MeanVariable, 2> kCavityMeanVariables{MeanVariable::AL,
                                                                  MeanVariable::AR};
inline constexpr std::array<MeanVariable, 2> kMechanicalMeanVariables{MeanVariable::Q,
                                                                      MeanVariable::P};

const char* to_string(MeanVariable v);
cplx component(const MeanState& s, MeanVariable v);

/// Sampled mean-field trajectory. `rates` holds the right-hand side at each
/// sample so that the trajectory can be interpolated with cubic Hermite
/// polynomials.
struct MeanSeries {
  std::vector<double> times;
  std::vector<MeanState> states;
  std::vector<MeanState> rates;
  double omega_mod = 1.0;
  IntegratorControls controls;

  std::size_t size() const { return times.size(); }
  /// Cubic Hermite interpolation; t must lie inside [times.front(), times.back()].
  MeanState interpolate(double t) const;
};

struct ConvergenceReport {
  bool converged = false;
  int periods_needed = 0;
  double final_residual = 0.0;
  double threshold = 0.0;
  /// residuals[k-1] compares period k with period k+1
  std::vector<double> residuals;
};

using HarmonicContent = std::array<std::map<int, cplx>, 4>;

/// Right-hand side of the classical mean-value equations. The returned
/// state carries time derivatives; its t field is set to `t`.
MeanState mean_rhs(const MeanState& state, const SystemParams& params, const DriveSpec& drive_L,
                   const DriveSpec& drive_R, double t);

/// Integrates the mean-value equations from init.t to t_end, sampling
/// controls.samples_per_period points per modulation period.
/// Throws Diverged, StepSizeUnderflow or ValidationError.
MeanSeries integrate_means(const SystemParams& params, const DriveSpec& drive_L,
                           const DriveSpec& drive_R, const MeanState& init, double t_end,
                           const IntegratorControls& controls = {});

/// Finds the first period k (1-based) whose sup-norm distance to period k+1,
/// taken over the real and imaginary parts of `variables` and divided by the
/// sup-norm of period k+1, falls below `threshold`. final_residual is the
/// residual at that period (or the last one when never converged).
ConvergenceReport detect_limit_cycle(const MeanSeries& series, double omega_mod, double threshold,
                                     std::span<const MeanVariable> variables = kAllMeanVariables);

/// Fourier coefficients c_n = (1/tau) int x(t) exp(+i n Omega t) dt over the
/// final full period, |n| <= n_max, by the trapezoid rule.
HarmonicContent fourier_extract(const MeanSeries& series, double omega_mod, int n_max);

/// Number of samples per modulation period of a uniformly sampled series.
/// Throws InsufficientData when the grid is not commensurate with the period.
int samples_per_period(const std::vector<double>& times, double omega_mod);

}  // namespace optomod
