#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optomod/fluctuations.hpp"
#include "optomod/model.hpp"

namespace optomod {

enum class Subsystem { M = 0, L = 1, R = 2 };
enum class SweepQuantity { Sigma11Min, ENMax };

const char* to_string(SweepQuantity q);
SweepQuantity parse_sweep_quantity(const std::string& name);

struct Extrema {
  double min = 0.0;
  double max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
};

struct SweepRow {
  double omega_mod = 0.0;
  double sigma11_min = std::numeric_limits<double>::quiet_NaN();
  double en_max = std::numeric_limits<double>::quiet_NaN();
  bool stable = false;
  bool converged = false;
  int periods = 0;
  std::string error;  ///< empty when the point completed normally
};

struct SweepScenario {
  SystemParams params;
  std::optional<TargetAmplitudes> targets;
  IntegratorControls controls;
  int max_periods = 600;
  double periodicity_tol = 1e-5;
  int stability_samples = 128;
  /// default: uncoupled thermal state of the system's baths
  std::optional<CovMatrix> sigma0;
};

double position_variance(const CovMatrix& sigma);

/// [[sigma_1, sigma_c], [sigma_c^T, sigma_2]] for the ordered pair (a, b).
Mat4 reduced_cm(const CovMatrix& sigma, Subsystem a, Subsystem b);

/// Logarithmic negativity max(0, -ln 2 eta) of a two-mode covariance matrix.
/// Throws InvalidCM when det sigma_r < 0 or eta is not real beyond tolerance.
double log_negativity(const Mat4& sigma_r);

/// Symplectic eigenvalues (ascending) of a 2N x 2N covariance matrix in
/// (x_1, p_1, ..., x_N, p_N) order. Requires sigma positive definite.
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& sigma);

/// Min and max of a scalar series over its final full period with parabolic
/// refinement at the extremal samples. The series must be uniformly sampled
/// and span at least two periods; NotConverged is thrown when the last two
/// periods differ by more than periodicity_tol * max(1, sup |value|).
Extrema periodic_extrema(std::span<const double> times, std::span<const double> values,
                         double omega_mod, double periodicity_tol = 1e-4);

std::vector<double> position_variance_series(const CovSeries& series);
std::vector<double> log_negativity_series(const CovSeries& series, Subsystem a, Subsystem b);

/// Evaluates one grid point of the Omega sweep (mean source: asymptotic
/// orbit of scenario.targets). Errors are captured in the row.
SweepRow sweep_point(double omega_mod, const SweepScenario& scenario);

/// Rows come back ordered like omega_grid regardless of worker scheduling.
std::vector<SweepRow> sweep_omega(const std::vector<double>& omega_grid,
                                  const SweepScenario& scenario, int workers = 0);

}  // namespace optomod
