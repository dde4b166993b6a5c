#include "optomod/measures.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace optomod {

const char* to_string(SweepQuantity q) {
  return q == SweepQuantity::Sigma11Min ? "sigma11_min" : "en_max";
}

SweepQuantity parse_sweep_quantity(const std::string& name) {
  if (name == "sigma11_min") return SweepQuantity::Sigma11Min;
  if (name == "en_max") return SweepQuantity::ENMax;
  throw Error(ErrorKind::Validation, "unknown sweep quantity '" + name + "'");
}

double position_variance(const CovMatrix& sigma) { return sigma(0, 0); }

Mat4 reduced_cm(const CovMatrix& sigma, Subsystem a, Subsystem b) {
  const int ia = 2 * static_cast<int>(a);
  const int ib = 2 * static_cast<int>(b);
  Mat4 r;
  r.topLeftCorner<2, 2>() = sigma.entries.block<2, 2>(ia, ia);
  r.topRightCorner<2, 2>() = sigma.entries.block<2, 2>(ia, ib);
  r.bottomLeftCorner<2, 2>() = sigma.entries.block<2, 2>(ib, ia);
  r.bottomRightCorner<2, 2>() = sigma.entries.block<2, 2>(ib, ib);
  return r;
}

double log_negativity(const Mat4& s) {
  const double det_r = s.determinant();
  if (det_r < -1e-12) throw Error(ErrorKind::InvalidCM, "reduced CM has negative determinant");
  const Mat2 s1 = s.topLeftCorner<2, 2>();
  const Mat2 s2 = s.bottomRightCorner<2, 2>();
  const Mat2 sc = s.topRightCorner<2, 2>();
  const double sigma = s1.determinant() + s2.determinant() - 2.0 * sc.determinant();
  double disc = sigma * sigma - 4.0 * std::max(det_r, 0.0);
  if (disc < -1e-12) throw Error(ErrorKind::InvalidCM, "negative discriminant in eta");
  disc = std::max(disc, 0.0);
  const double eta_sq = 0.5 * (sigma - std::sqrt(disc));
  if (eta_sq < -1e-12) throw Error(ErrorKind::InvalidCM, "smallest partially transposed eigenvalue is not real");
  const double eta = std::sqrt(std::max(eta_sq, 0.0));
  if (eta == 0.0) throw Error(ErrorKind::InvalidCM, "pure-zero symplectic spectrum");
  return std::max(0.0, -std::log(2.0 * eta));
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& sigma) {
  const Eigen::Index dim = sigma.rows();
  if (dim != sigma.cols() || dim % 2 != 0)
    throw Error(ErrorKind::InvalidCM, "covariance matrix must be square with even dimension");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sigma + sigma.transpose()));
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::InvalidCM, "covariance matrix is not positive definite");
  const Eigen::MatrixXd root = es.operatorSqrt();
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  // i S Omega S is Hermitian and similar to i Omega sigma; spectrum is {+nu, -nu}
  const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * (root * omega * root).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
  if (hs.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "symplectic spectrum");
  Eigen::VectorXd nu = hs.eigenvalues().tail(dim / 2);
  std::sort(nu.begin(), nu.end());
  return nu;
}

Extrema periodic_extrema(std::span<const double> times, std::span<const double> values,
                         double omega_mod, double periodicity_tol) {
  if (times.size() != values.size() || times.size() < 3)
    throw Error(ErrorKind::InsufficientData, "need matching time/value series");
  const std::vector<double> t(times.begin(), times.end());
  const int spp = samples_per_period(t, omega_mod);
  if (values.size() < static_cast<std::size_t>(2 * spp + 1))
    throw Error(ErrorKind::InsufficientData, "series spans fewer than 2 periods");

  const std::size_t start = values.size() - 1 - spp;  // final period [start, end]
  double diff = 0.0, scale = 0.0;
  for (int j = 0; j <= spp; ++j) {
    diff = std::max(diff, std::abs(values[start + j] - values[start + j - spp]));
    scale = std::max(scale, std::abs(values[start + j]));
  }
  // relative above unit scale, absolute below
  if (diff > periodicity_tol * std::max(scale, 1.0)) {
    std::ostringstream os;
    os << "last two periods differ by " << diff << " (scale " << scale << ")";
    throw Error(ErrorKind::NotConverged, os.str());
  }

  // one period of distinct samples; neighbours wrap around
  auto at = [&](int j) { return values[start + ((j % spp) + spp) % spp]; };
  const double h = times[1] - times[0];
  auto refine = [&](int j, double& value, double& when) {
    const double ym = at(j - 1), y0 = at(j), yp = at(j + 1);
    const double curv = ym - 2.0 * y0 + yp;
    double delta = 0.0;
    if (curv != 0.0) delta = std::clamp(0.5 * (ym - yp) / curv, -0.5, 0.5);
    value = y0 - 0.25 * (ym - yp) * delta;
    when = times[start + j] + delta * h;
  };
  int jmin = 0, jmax = 0;
  for (int j = 1; j < spp; ++j) {
    if (at(j) < at(jmin)) jmin = j;
    if (at(j) > at(jmax)) jmax = j;
  }
  Extrema e;
  refine(jmin, e.min, e.t_min);
  refine(jmax, e.max, e.t_max);
  return e;
}

std::vector<double> position_variance_series(const CovSeries& series) {
  std::vector<double> v;
  v.reserve(series.size());
  for (const auto& m : series.matrices) v.push_back(position_variance(m));
  return v;
}

std::vector<double> log_negativity_series(const CovSeries& series, Subsystem a, Subsystem b) {
  std::vector<double> v;
  v.reserve(series.size());
  for (const auto& m : series.matrices) v.push_back(log_negativity(reduced_cm(m, a, b)));
  return v;
}

SweepRow sweep_point(double omega_mod, const SweepScenario& sc) {
  SweepRow row;
  row.omega_mod = omega_mod;
  try {
    if (!sc.targets) throw Error(ErrorKind::Validation, "sweep requires target amplitudes");
    const MeanSource means = asymptotic_source(*sc.targets, sc.params, omega_mod);
    const auto stab = stability_scan(sc.params, means, omega_mod, sc.stability_samples, 0.0);
    row.stable = stab.stable;
    if (!stab.stable) {
      row.error = "unstable: max Re eig(R) = " + std::to_string(stab.max_real_eig);
      return row;
    }
    const auto floq = floquet_analysis(sc.params, means, omega_mod, 0.0, sc.controls);
    row.stable = floq.stable;
    if (!floq.stable) {
      row.error = "unstable: Floquet spectral radius = " + std::to_string(floq.spectral_radius);
      return row;
    }
    const CovMatrix sigma0 = sc.sigma0.value_or(CovMatrix::thermal(sc.params.n_bar_m, sc.params.n_bar_a));
    const auto orbit = integrate_cm_to_periodic(sc.params, means, omega_mod, sigma0, 0.0,
                                                sc.max_periods, sc.periodicity_tol, sc.controls);
    row.converged = orbit.converged;
    row.periods = orbit.periods;
    const auto tol = std::max(sc.periodicity_tol, 1e-4);
    row.sigma11_min =
        periodic_extrema(orbit.tail.times, position_variance_series(orbit.tail), omega_mod, tol).min;
    row.en_max = periodic_extrema(orbit.tail.times,
                                  log_negativity_series(orbit.tail, Subsystem::L, Subsystem::R),
                                  omega_mod, tol)
                     .max;
    if (!orbit.converged) row.error = "periodicity residual " + std::to_string(orbit.residual);
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep_omega(const std::vector<double>& grid, const SweepScenario& sc,
                                  int workers) {
  std::vector<SweepRow> rows(grid.size());
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) rows[k] = sweep_point(grid[k], sc);
  };
  if (workers == 1) {
    work();
    return rows;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return rows;
}

}  // namespace optomod
