#include "optomod/fluctuations.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "optomod/drive_design.hpp"

namespace optomod {

namespace {

using Packed = std::array<double, 21>;

constexpr std::array<std::pair<int, int>, 21> kUpper = [] {
  std::array<std::pair<int, int>, 21> idx{};
  std::size_t k = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) idx[k++] = {i, j};
  return idx;
}();

Packed pack(const Mat6& m) {
  Packed x{};
  for (std::size_t k = 0; k < kUpper.size(); ++k) x[k] = m(kUpper[k].first, kUpper[k].second);
  return x;
}

Mat6 unpack(const Packed& x) {
  Mat6 m;
  for (std::size_t k = 0; k < kUpper.size(); ++k) {
    const auto [i, j] = kUpper[k];
    m(i, j) = x[k];
    m(j, i) = x[k];
  }
  return m;
}

double sup_norm(const Mat6& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

MeanSource series_source(std::shared_ptr<const MeanSeries> series) {
  return [series = std::move(series)](double t) { return series->interpolate(t); };
}

MeanSource asymptotic_source(const TargetAmplitudes& targets, const SystemParams& params,
                             double omega_mod) {
  // fail early on a resonant modulation frequency
  (void)asymptotic_mech_means(targets, params, omega_mod, 0.0);
  return [targets, params, omega_mod](double t) {
    return asymptotic_means(targets, params, omega_mod, t);
  };
}

std::pair<double, double> effective_detunings(const SystemParams& p, double q_mean) {
  return {p.delta_L + p.g * q_mean, p.delta_R - p.g * q_mean};
}

std::pair<cplx, cplx> effective_couplings(const SystemParams& p, cplx a_L, cplx a_R) {
  const double s = std::sqrt(2.0) * p.g;
  return {s * a_L, s * a_R};
}

Mat6 drift_matrix(const SystemParams& p, const MeanState& mean, double imag_tol) {
  const double q = mean.q.real();
  if (std::abs(mean.q.imag()) > imag_tol * std::max(1.0, std::abs(q))) {
    std::ostringstream os;
    os << "Im<Q> = " << mean.q.imag() << " at t = " << mean.t;
    throw Error(ErrorKind::NonRealMean, os.str());
  }
  const auto [d1, d2] = effective_detunings(p, q);
  const auto [GL, GR] = effective_couplings(p, mean.a_L, mean.a_R);
  const double Lr = GL.real(), Li = GL.imag(), Rr = GR.real(), Ri = GR.imag();
  const double w = p.omega_m, k = p.kappa, J = p.J;
  Mat6 R;
  // clang-format off
  R <<   0,   w,           0,   0,   0,   0,
        -w,  -p.gamma_m,  -Lr, -Li,  Rr,  Ri,
        Li,   0,          -k,   d1,  0,   J,
       -Lr,   0,          -d1, -k,  -J,   0,
       -Ri,   0,           0,   J,  -k,   d2,
        Rr,   0,          -J,   0,  -d2, -k;
  // clang-format on
  return R;
}

Mat6 diffusion_matrix(const SystemParams& p) {
  Mat6 D = Mat6::Zero();
  const double cav = p.kappa * (2.0 * p.n_bar_a + 1.0);
  D.diagonal() << 0.0, p.gamma_m * (2.0 * p.n_bar_m + 1.0), cav, cav, cav, cav;
  return D;
}

namespace {

template <class Observer>
void run_cm(const SystemParams& params, const MeanSource& means, const Mat6& sigma0,
            const std::vector<double>& grid, const IntegratorControls& controls,
            Observer&& observe) {
  const Mat6 D = diffusion_matrix(params);
  auto rhs = [&](const Packed& x, Packed& dx, double t) {
    const Mat6 R = drift_matrix(params, means(t));
    const Mat6 RS = R * unpack(x);
    dx = pack(RS + RS.transpose() + D);
  };
  detail::integrate_sampled(rhs, pack(sigma0), grid, controls,
                            [&](const Packed& x, double t, std::size_t k) {
                              observe(unpack(x), t, k);
                            });
}

void check_sigma0(const CovMatrix& sigma0) {
  if (sigma0.asymmetry() > 1e-10) throw Error(ErrorKind::Validation, "sigma0 must be symmetric");
}

}  // namespace

CovSeries integrate_cm(const SystemParams& params, const MeanSource& means, double omega_mod,
                       const CovMatrix& sigma0, double t0, double t_end,
                       const IntegratorControls& controls) {
  params.validate();
  check_sigma0(sigma0);
  if (!(t_end > t0)) throw Error(ErrorKind::Validation, "t_end must exceed t0");
  const double h = 2.0 * std::numbers::pi / omega_mod / controls.samples_per_period;
  const auto intervals = static_cast<std::size_t>(std::floor((t_end - t0) / h + 1e-9));
  std::vector<double> grid = detail::uniform_grid(t0, h, intervals);
  if (grid.back() < t_end - 1e-9 * h) grid.push_back(t_end);

  CovSeries out;
  out.times.reserve(grid.size());
  out.matrices.reserve(grid.size());
  run_cm(params, means, sigma0.entries, grid, controls, [&](const Mat6& s, double t, std::size_t) {
    out.times.push_back(t);
    out.matrices.push_back(CovMatrix{s});
  });
  return out;
}

PeriodicCovOrbit integrate_cm_to_periodic(const SystemParams& params, const MeanSource& means,
                                          double omega_mod, const CovMatrix& sigma0, double t0,
                                          int max_periods, double tol,
                                          const IntegratorControls& controls, int keep_periods,
                                          int min_periods) {
  params.validate();
  check_sigma0(sigma0);
  if (max_periods < 2) throw Error(ErrorKind::Validation, "max_periods must be >= 2");
  keep_periods = std::max(keep_periods, 1);
  const int spp = controls.samples_per_period;
  const double tau = 2.0 * std::numbers::pi / omega_mod;
  const double h = tau / spp;

  // ring buffer of the last keep_periods + 1 periods' samples
  const int keep = std::max(keep_periods, 1) + 1;
  std::vector<std::vector<Mat6>> periods_data;
  std::vector<std::vector<double>> periods_time;

  PeriodicCovOrbit orbit;
  Mat6 sigma = sigma0.entries;
  double t_start = t0;
  for (int k = 0; k < max_periods; ++k) {
    std::vector<double> grid = detail::uniform_grid(t_start, h, spp);
    std::vector<Mat6> samples;
    samples.reserve(grid.size());
    run_cm(params, means, sigma, grid, controls,
           [&](const Mat6& s, double, std::size_t) { samples.push_back(s); });
    sigma = samples.back();
    t_start = t0 + (k + 1) * tau;
    periods_data.push_back(std::move(samples));
    periods_time.push_back(std::move(grid));
    if (static_cast<int>(periods_data.size()) > keep) {
      periods_data.erase(periods_data.begin());
      periods_time.erase(periods_time.begin());
    }
    orbit.periods = k + 1;
    if (periods_data.size() >= 2) {
      const auto& prev = periods_data[periods_data.size() - 2];
      const auto& last = periods_data.back();
      double diff = 0.0, scale = 0.0;
      for (std::size_t j = 0; j < last.size(); ++j) {
        diff = std::max(diff, sup_norm(last[j] - prev[j]));
        scale = std::max(scale, sup_norm(last[j]));
      }
      orbit.residual = scale > 0.0 ? diff / scale : diff;
      if (orbit.periods >= std::max(min_periods, keep_periods) && orbit.residual < tol) {
        orbit.converged = true;
        break;
      }
    }
  }

  const std::size_t n = std::min<std::size_t>(keep_periods, periods_data.size());
  for (std::size_t p = periods_data.size() - n; p < periods_data.size(); ++p) {
    // consecutive periods share an endpoint; keep it once
    const std::size_t skip = orbit.tail.times.empty() ? 0 : 1;
    for (std::size_t j = skip; j < periods_data[p].size(); ++j) {
      orbit.tail.times.push_back(periods_time[p][j]);
      orbit.tail.matrices.push_back(CovMatrix{periods_data[p][j]});
    }
  }
  orbit.final_sigma = CovMatrix{sigma};
  return orbit;
}

StabilityReport stability_scan(const SystemParams& params, const MeanSource& means,
                               double omega_mod, int n_samples, double t0) {
  if (n_samples < 32) throw Error(ErrorKind::Validation, "stability scan needs >= 32 samples");
  const double tau = 2.0 * std::numbers::pi / omega_mod;
  StabilityReport rep;
  rep.max_real_eig = -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Mat6> solver;
  for (int k = 0; k < n_samples; ++k) {
    const double t = t0 + tau * k / n_samples;
    solver.compute(drift_matrix(params, means(t)), false);
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigenvalue solver failed at t = " << t;
      throw Error(ErrorKind::EigenFailure, os.str());
    }
    const double m = solver.eigenvalues().real().maxCoeff();
    rep.times.push_back(t);
    rep.max_real.push_back(m);
    if (m > rep.max_real_eig) {
      rep.max_real_eig = m;
      rep.worst_t = t;
    }
  }
  rep.stable = rep.max_real_eig < 0.0;
  return rep;
}

FloquetReport floquet_analysis(const SystemParams& params, const MeanSource& means,
                               double omega_mod, double t0, const IntegratorControls& controls) {
  using Flat = std::array<double, 36>;
  const double tau = 2.0 * std::numbers::pi / omega_mod;
  Flat phi{};
  for (int k = 0; k < 6; ++k) phi[k * 6 + k] = 1.0;
  auto rhs = [&](const Flat& x, Flat& dx, double t) {
    const Mat6 R = drift_matrix(params, means(t));
    Eigen::Map<const Mat6> X(x.data());
    Eigen::Map<Mat6> DX(dx.data());
    DX = R * X;
  };
  IntegratorControls c = controls;
  c.max_magnitude = std::numeric_limits<double>::max();
  Mat6 monodromy;
  detail::integrate_sampled(rhs, phi, detail::uniform_grid(t0, tau / c.samples_per_period,
                                                           c.samples_per_period),
                            c, [&](const Flat& x, double, std::size_t) {
                              monodromy = Eigen::Map<const Mat6>(x.data());
                            });
  Eigen::EigenSolver<Mat6> solver(monodromy, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::EigenFailure, "monodromy eigenvalues did not converge");
  FloquetReport rep;
  rep.multipliers = solver.eigenvalues();
  rep.spectral_radius = rep.multipliers.cwiseAbs().maxCoeff();
  rep.max_exponent = std::log(rep.spectral_radius) / tau;
  rep.stable = rep.spectral_radius < 1.0;
  return rep;
}

}  // namespace optomod
