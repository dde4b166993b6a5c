#include "optomod/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optomod {

namespace {

using State8 = std::array<double, kMeanComponents>;

State8 pack(const MeanState& s) {
  return {s.q.real(), s.q.imag(), s.p.real(), s.p.imag(),
          s.a_L.real(), s.a_L.imag(), s.a_R.real(), s.a_R.imag()};
}

MeanState unpack(const State8& x, double t) {
  return {t, {x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]}, {x[6], x[7]}};
}

}  // namespace

const char* to_string(MeanVariable v) {
  switch (v) {
    case MeanVariable::Q: return "q";
    case MeanVariable::P: return "p";
    case MeanVariable::AL: return "a_L";
    case MeanVariable::AR: return "a_R";
  }
  return "?";
}

cplx component(const MeanState& s, MeanVariable v) {
  switch (v) {
    case MeanVariable::Q: return s.q;
    case MeanVariable::P: return s.p;
    case MeanVariable::AL: return s.a_L;
    case MeanVariable::AR: return s.a_R;
  }
  return {};
}

MeanState mean_rhs(const MeanState& s, const SystemParams& par, const DriveSpec& drive_L,
                   const DriveSpec& drive_R, double t) {
  constexpr cplx I{0.0, 1.0};
  MeanState d;
  d.t = t;
  d.q = par.omega_m * s.p;
  // radiation pressure uses conj(A) * A, which stays complex-valued in general
  d.p = -par.omega_m * s.q - par.gamma_m * s.p -
        par.g * (std::conj(s.a_L) * s.a_L - std::conj(s.a_R) * s.a_R);
  d.a_L = -(par.kappa + I * par.delta_L) * s.a_L - I * par.g * s.a_L * s.q - I * par.J * s.a_R +
          drive_L(t);
  d.a_R = -(par.kappa + I * par.delta_R) * s.a_R + I * par.g * s.a_R * s.q - I * par.J * s.a_L +
          drive_R(t);
  return d;
}

MeanSeries integrate_means(const SystemParams& params, const DriveSpec& drive_L,
                           const DriveSpec& drive_R, const MeanState& init, double t_end,
                           const IntegratorControls& controls) {
  params.validate();
  if (!(t_end > init.t)) throw Error(ErrorKind::Validation, "t_end must exceed the initial time");
  if (controls.samples_per_period < 4)
    throw Error(ErrorKind::Validation, "samples_per_period must be >= 4");
  if (std::abs(drive_L.omega_mod() - drive_R.omega_mod()) > 1e-12 * drive_L.omega_mod())
    throw Error(ErrorKind::Validation, "left and right drives must share omega_mod");

  const double tau = drive_L.period();
  const double h = tau / controls.samples_per_period;
  const auto intervals = static_cast<std::size_t>(std::floor((t_end - init.t) / h + 1e-9));
  std::vector<double> grid = detail::uniform_grid(init.t, h, intervals);
  if (grid.back() < t_end - 1e-9 * h) grid.push_back(t_end);

  MeanSeries series;
  series.omega_mod = drive_L.omega_mod();
  series.controls = controls;
  series.times = grid;
  series.states.reserve(grid.size());
  series.rates.reserve(grid.size());

  auto rhs = [&](const State8& x, State8& dx, double t) {
    dx = pack(mean_rhs(unpack(x, t), params, drive_L, drive_R, t));
  };
  detail::integrate_sampled(rhs, pack(init), grid, controls,
                            [&](const State8& x, double t, std::size_t) {
                              MeanState s = unpack(x, t);
                              series.states.push_back(s);
                              series.rates.push_back(mean_rhs(s, params, drive_L, drive_R, t));
                            });
  return series;
}

MeanState MeanSeries::interpolate(double t) const {
  if (times.size() < 2 || t < times.front() - 1e-12 || t > times.back() + 1e-12) {
    std::ostringstream os;
    os << "interpolation time " << t << " outside series range";
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t k = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  k = std::min(k, times.size() - 2);
  const double h = times[k + 1] - times[k];
  const double s = (t - times[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  auto mix = [&](cplx y0, cplx d0, cplx y1, cplx d1) {
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  };
  const MeanState& a = states[k];
  const MeanState& b = states[k + 1];
  const MeanState& da = rates[k];
  const MeanState& db = rates[k + 1];
  return {t, mix(a.q, da.q, b.q, db.q), mix(a.p, da.p, b.p, db.p),
          mix(a.a_L, da.a_L, b.a_L, db.a_L), mix(a.a_R, da.a_R, b.a_R, db.a_R)};
}

int samples_per_period(const std::vector<double>& times, double omega_mod) {
  if (times.size() < 2) throw Error(ErrorKind::InsufficientData, "series has fewer than 2 samples");
  const double tau = 2.0 * std::numbers::pi / omega_mod;
  const double h = times[1] - times[0];
  const double spp = tau / h;
  const long n = std::lround(spp);
  if (n < 1 || std::abs(spp - static_cast<double>(n)) > 1e-6 * spp)
    throw Error(ErrorKind::InsufficientData, "sample spacing does not divide the modulation period");
  return static_cast<int>(n);
}

ConvergenceReport detect_limit_cycle(const MeanSeries& series, double omega_mod, double threshold,
                                     std::span<const MeanVariable> variables) {
  const int spp = samples_per_period(series.times, omega_mod);
  // uniform samples only; a trailing off-grid point (t_end) is ignored
  std::size_t usable = series.size();
  const double h = series.times[1] - series.times[0];
  while (usable > 2 && std::abs((series.times[usable - 1] - series.times[usable - 2]) - h) > 1e-9 * h)
    --usable;
  const std::size_t periods = (usable - 1) / static_cast<std::size_t>(spp);
  if (periods < 2) throw Error(ErrorKind::InsufficientData, "series spans fewer than 2 periods");

  ConvergenceReport report;
  report.threshold = threshold;
  for (std::size_t k = 0; k + 1 < periods; ++k) {
    double diff = 0.0, scale = 0.0;
    for (int j = 0; j <= spp; ++j) {
      const std::size_t a = k * spp + j;
      const std::size_t b = a + spp;
      for (MeanVariable v : variables) {
        const cplx xa = component(series.states[a], v);
        const cplx xb = component(series.states[b], v);
        diff = std::max({diff, std::abs(xb.real() - xa.real()), std::abs(xb.imag() - xa.imag())});
        scale = std::max({scale, std::abs(xb.real()), std::abs(xb.imag())});
      }
    }
    report.residuals.push_back(scale > 0.0 ? diff / scale : diff);
  }

  const auto hit = std::find_if(report.residuals.begin(), report.residuals.end(),
                                [threshold](double r) { return r < threshold; });
  report.converged = hit != report.residuals.end();
  if (report.converged) {
    report.periods_needed = static_cast<int>(hit - report.residuals.begin()) + 1;
    report.final_residual = *hit;
  } else {
    report.final_residual = report.residuals.back();
  }
  return report;
}

HarmonicContent fourier_extract(const MeanSeries& series, double omega_mod, int n_max) {
  if (n_max < 0) throw Error(ErrorKind::Validation, "n_max must be >= 0");
  const int spp = samples_per_period(series.times, omega_mod);
  std::size_t last = series.size() - 1;
  const double h = series.times[1] - series.times[0];
  while (last > 1 && std::abs((series.times[last] - series.times[last - 1]) - h) > 1e-9 * h) --last;
  if (last < static_cast<std::size_t>(spp) || spp < 4 * std::max(n_max, 1))
    throw Error(ErrorKind::InsufficientData,
                "final window must cover one period with at least 4 n_max samples");

  HarmonicContent out;
  const std::size_t start = last - spp;
  for (int n = -n_max; n <= n_max; ++n) {
    std::array<cplx, 4> acc{};
    for (int j = 0; j < spp; ++j) {
      const MeanState& s = series.states[start + j];
      // periodic trapezoid: endpoints share a weight, so sum spp samples
      const cplx w = std::polar(1.0, n * omega_mod * series.times[start + j]);
      for (std::size_t v = 0; v < 4; ++v) acc[v] += component(s, kAllMeanVariables[v]) * w;
    }
    for (std::size_t v = 0; v < 4; ++v) out[v][n] = acc[v] / static_cast<double>(spp);
  }
  return out;
}

}  // namespace optomod
