#include "optomod/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optomod {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kSingular = 1e-12;

[[noreturn]] void singular(const char* what, int n, int l) {
  std::ostringstream os;
  os << what << " vanishes at harmonic n = " << n << ", order l = " << l;
  throw Error(ErrorKind::SingularDenominator, os.str());
}

struct CavityPair {
  cplx a_L, a_R;
};

// Solves [[aL, iJ], [iJ, aR]] (x_L, x_R) = (r_L, r_R) with aj = kappa + i Delta_j - i n Omega.
CavityPair solve_cavities(const SystemParams& p, double omega_mod, int n, int l, cplx r_L,
                          cplx r_R) {
  const cplx aL{p.kappa, p.delta_L - n * omega_mod};
  const cplx aR{p.kappa, p.delta_R - n * omega_mod};
  const cplx det = aL * aR + p.J * p.J;
  if (std::abs(det) < kSingular) singular("cavity determinant", n, l);
  return {(aR * r_L - I * p.J * r_R) / det, (aL * r_R - I * p.J * r_L) / det};
}

void check_drive_support(const DriveSpec& d, int n_max) {
  if (d.max_abs_harmonic() > n_max)
    throw Error(ErrorKind::Validation, "drive harmonics exceed the n_max truncation");
}

}  // namespace

FourierCoeffTable::FourierCoeffTable(int n_max, int l_max, double omega_mod)
    : n_max_(n_max), l_max_(l_max), omega_mod_(omega_mod) {
  if (n_max < 0 || l_max < 0) throw Error(ErrorKind::Validation, "truncations must be >= 0");
  data_.assign(4 * static_cast<std::size_t>(l_max + 1) * (2 * n_max + 1), cplx{});
}

std::size_t FourierCoeffTable::index(MeanVariable v, int n, int l) const {
  const std::size_t width = 2 * n_max_ + 1;
  return (static_cast<std::size_t>(v) * (l_max_ + 1) + l) * width + (n + n_max_);
}

cplx FourierCoeffTable::coeff(MeanVariable v, int n, int l) const {
  if (std::abs(n) > n_max_ || l < 0 || l > l_max_) return {};
  return data_[index(v, n, l)];
}

void FourierCoeffTable::set(MeanVariable v, int n, int l, cplx value) {
  if (std::abs(n) > n_max_ || l < 0 || l > l_max_)
    throw Error(ErrorKind::Validation, "coefficient index outside truncation");
  data_[index(v, n, l)] = value;
}

FourierCoeffTable zero_order_coeffs(const SystemParams& params, const DriveSpec& drive_L,
                                    const DriveSpec& drive_R, int n_max) {
  return recursive_coeffs(params, drive_L, drive_R, n_max, 0);
}

FourierCoeffTable recursive_coeffs(const SystemParams& params, const DriveSpec& drive_L,
                                   const DriveSpec& drive_R, int n_max, int l_max) {
  params.validate();
  check_drive_support(drive_L, n_max);
  check_drive_support(drive_R, n_max);
  const double W = drive_L.omega_mod();
  const double wm = params.omega_m;
  FourierCoeffTable table(n_max, l_max, W);

  for (int n = -n_max; n <= n_max; ++n) {
    const auto a = solve_cavities(params, W, n, 0, drive_L.coefficient(n), drive_R.coefficient(n));
    table.set(MeanVariable::AL, n, 0, a.a_L);
    table.set(MeanVariable::AR, n, 0, a.a_R);
  }

  using V = MeanVariable;
  for (int l = 1; l <= l_max; ++l) {
    // radiation-pressure force harmonics feed the mechanical response
    for (int n = -n_max; n <= n_max; ++n) {
      cplx force{};
      for (int k = 0; k <= l - 1; ++k) {
        for (int m = -n_max; m <= n_max; ++m) {
          force += std::conj(table.coeff(V::AL, m, k)) * table.coeff(V::AL, n + m, l - 1 - k) -
                   std::conj(table.coeff(V::AR, m, k)) * table.coeff(V::AR, n + m, l - 1 - k);
        }
      }
      const double nW = n * W;
      const cplx denom{wm * wm - nW * nW, -params.gamma_m * nW};
      if (std::abs(denom) < kSingular) singular("mechanical response denominator", n, l);
      const cplx q = -wm * force / denom;
      table.set(V::Q, n, l, q);
      table.set(V::P, n, l, -I * nW * q / wm);
    }
    for (int n = -n_max; n <= n_max; ++n) {
      cplx r_L{}, r_R{};
      for (int k = 0; k <= l - 1; ++k) {
        for (int m = -n_max; m <= n_max; ++m) {
          const cplx q = table.coeff(V::Q, n - m, l - 1 - k);
          r_L += table.coeff(V::AL, m, k) * q;
          r_R += table.coeff(V::AR, m, k) * q;
        }
      }
      const auto a = solve_cavities(params, W, n, l, -I * r_L, I * r_R);
      table.set(V::AL, n, l, a.a_L);
      table.set(V::AR, n, l, a.a_R);
    }
  }
  return table;
}

namespace {

template <class Weight>
MeanState accumulate(const FourierCoeffTable& table, double g, double t, Weight weight) {
  MeanState s;
  s.t = t;
  double gl = 1.0;
  for (int l = 0; l <= table.l_max(); ++l, gl *= g) {
    for (int n = -table.n_max(); n <= table.n_max(); ++n) {
      const cplx w = gl * weight(n);
      s.q += table.coeff(MeanVariable::Q, n, l) * w;
      s.p += table.coeff(MeanVariable::P, n, l) * w;
      s.a_L += table.coeff(MeanVariable::AL, n, l) * w;
      s.a_R += table.coeff(MeanVariable::AR, n, l) * w;
    }
  }
  return s;
}

}  // namespace

MeanState eval_series(const FourierCoeffTable& table, double g, double t) {
  const double W = table.omega_mod();
  return accumulate(table, g, t, [&](int n) { return std::polar(1.0, -n * W * t); });
}

MeanState eval_series_rate(const FourierCoeffTable& table, double g, double t) {
  const double W = table.omega_mod();
  return accumulate(table, g, t,
                    [&](int n) { return -I * (n * W) * std::polar(1.0, -n * W * t); });
}

double final_period_deviation(const MeanSeries& series, const FourierCoeffTable& table, double g,
                              std::span<const MeanVariable> variables) {
  const int spp = samples_per_period(series.times, table.omega_mod());
  if (series.size() < static_cast<std::size_t>(spp + 1))
    throw Error(ErrorKind::InsufficientData, "series shorter than one period");
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = series.size() - 1 - spp; k < series.size(); ++k) {
    const MeanState ref = eval_series(table, g, series.times[k]);
    for (const auto v : variables) {
      const cplx a = component(series.states[k], v), b = component(ref, v);
      diff = std::max({diff, std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag())});
      scale = std::max({scale, std::abs(b.real()), std::abs(b.imag())});
    }
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace optomod
