#include "optomod/model.hpp"

#include <cmath>
#include <sstream>

namespace optomod {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Validation, what);
}

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(omega_m) && omega_m > 0.0, "omega_m must be > 0");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
  require(std::isfinite(gamma_m) && gamma_m >= 0.0, "gamma_m must be >= 0");
  require(std::isfinite(n_bar_a) && n_bar_a >= 0.0, "n_bar_a must be >= 0");
  require(std::isfinite(n_bar_m) && n_bar_m >= 0.0, "n_bar_m must be >= 0");
  require(std::isfinite(J) && std::isfinite(delta_L) && std::isfinite(delta_R) && std::isfinite(g),
          "J, delta_L, delta_R and g must be finite");
}

DriveSpec::DriveSpec(double omega_mod, std::map<int, cplx> harmonics)
    : omega_mod_(omega_mod), harmonics_(std::move(harmonics)) {
  require(std::isfinite(omega_mod) && omega_mod > 0.0, "drive omega_mod must be > 0");
  for (const auto& [n, e] : harmonics_) {
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
      std::ostringstream os;
      os << "drive harmonic " << n << " is not finite";
      throw Error(ErrorKind::Validation, os.str());
    }
  }
}

cplx DriveSpec::coefficient(int n) const {
  auto it = harmonics_.find(n);
  return it == harmonics_.end() ? cplx{} : it->second;
}

int DriveSpec::max_abs_harmonic() const {
  int m = 0;
  for (const auto& [n, e] : harmonics_) m = std::max(m, std::abs(n));
  return m;
}

cplx DriveSpec::operator()(double t) const {
  cplx sum{};
  for (const auto& [n, e] : harmonics_) {
    // reduce the phase modulo 2 pi so that E(t + tau) == E(t) to rounding
    double phase = std::fmod(static_cast<double>(n) * omega_mod_ * t, 2.0 * std::numbers::pi);
    sum += e * std::polar(1.0, -phase);
  }
  return sum;
}

CovMatrix CovMatrix::vacuum() {
  CovMatrix s;
  s.entries = 0.5 * Mat6::Identity();
  return s;
}

CovMatrix CovMatrix::thermal(double n_bar_m, double n_bar_a) {
  CovMatrix s;
  s.entries.diagonal() << n_bar_m + 0.5, n_bar_m + 0.5, n_bar_a + 0.5, n_bar_a + 0.5,
      n_bar_a + 0.5, n_bar_a + 0.5;
  return s;
}

TargetAmplitudes::TargetAmplitudes(double a_L0, double a_L1, double a_R0, double a_R1)
    : a_L0_(a_L0), a_L1_(a_L1), a_R0_(a_R0), a_R1_(a_R1) {
  for (double a : {a_L0, a_L1, a_R0, a_R1}) {
    require(std::isfinite(a) && a >= 0.0, "target amplitudes must be finite nonnegative reals");
  }
  if (!(a_L1 + a_R1 < a_L0 + a_R0)) {
    std::ostringstream os;
    os << "stability inequality a_L1 + a_R1 < a_L0 + a_R0 violated (" << a_L1 + a_R1
       << " >= " << a_L0 + a_R0 << ")";
    throw Error(ErrorKind::Validation, os.str());
  }
}

TargetAmplitudes TargetAmplitudes::from_couplings(double G_L0, double G_L1, double G_R0,
                                                  double G_R1, double g) {
  require(std::isfinite(g) && g > 0.0, "g must be > 0 to convert couplings to amplitudes");
  const double s = 1.0 / (std::sqrt(2.0) * g);
  return {G_L0 * s, G_L1 * s, G_R0 * s, G_R1 * s};
}

TargetAmplitudes TargetAmplitudes::scaled(double factor) const {
  return {a_L0_ * factor, a_L1_ * factor, a_R0_ * factor, a_R1_ * factor};
}

}  // namespace optomod
