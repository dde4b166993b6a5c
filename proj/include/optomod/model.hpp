#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "optomod/errors.hpp"

namespace optomod {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Physical constants of the membrane-in-the-middle system. All rates and
/// frequencies are in units of the mechanical frequency, so omega_m is
/// normally 1.
struct SystemParams {
  double omega_m = 1.0;
  double kappa = 0.0;    ///< cavity amplitude decay rate
  double gamma_m = 0.0;  ///< mechanical damping rate
  double J = 0.0;        ///< cavity-cavity tunneling
  double delta_L = 0.0;
  double delta_R = 0.0;
  double g = 0.0;        ///< single-photon optomechanical coupling
  double n_bar_a = 0.0;  ///< mean bath photon number
  double n_bar_m = 0.0;  ///< mean thermal phonon number

  /// Throws ValidationError naming the violated invariant.
  void validate() const;

  /// True when omega_m / gamma_m < 10, i.e. the Markovian Brownian-noise
  /// model is questionable.
  bool low_quality_factor() const { return gamma_m > 0.0 && omega_m / gamma_m < 10.0; }
};

/// Periodic complex drive E(t) = sum_n E_n exp(-i n Omega t).
///
/// Harmonic n = +1 is the exp(-i Omega t) sideband throughout the library.
class DriveSpec {
 public:
  DriveSpec() = default;
  DriveSpec(double omega_mod, std::map<int, cplx> harmonics);

  double omega_mod() const { return omega_mod_; }
  const std::map<int, cplx>& harmonics() const { return harmonics_; }

  /// Coefficient E_n, zero when absent.
  cplx coefficient(int n) const;
  int max_abs_harmonic() const;
  double period() const { return 2.0 * std::numbers::pi / omega_mod_; }

  cplx operator()(double t) const;

 private:
  double omega_mod_ = 1.0;
  std::map<int, cplx> harmonics_;
};

inline double period(const DriveSpec& drive) { return drive.period(); }
inline cplx drive_eval(const DriveSpec& drive, double t) { return drive(t); }

/// Classical means <Q>, <P>, <A_L>, <A_R> at time t.
struct MeanState {
  double t = 0.0;
  cplx q{};
  cplx p{};
  cplx a_L{};
  cplx a_R{};
};

/// Number of real scalar components in a MeanState (Re/Im of four means).
inline constexpr int kMeanComponents = 8;

/// 6x6 covariance matrix in quadrature ordering (q, p, x_L, y_L, x_R, y_R).
/// Vacuum variance is 1/2.
struct CovMatrix {
  Mat6 entries = Mat6::Zero();

  double operator()(int k, int l) const { return entries(k, l); }
  double asymmetry() const { return (entries - entries.transpose()).cwiseAbs().maxCoeff(); }
  void symmetrize() { entries = 0.5 * (entries + entries.transpose()); }

  static CovMatrix vacuum();
  /// diag(n_m + 1/2, n_m + 1/2, n_a + 1/2 x4)
  static CovMatrix thermal(double n_bar_m, double n_bar_a);
};

/// Real limit-cycle amplitudes of <A_j(t)> = A_j0 + A_j1 exp(-i Omega t).
class TargetAmplitudes {
 public:
  /// Throws ValidationError unless all amplitudes are finite and nonnegative
  /// and a_L1 + a_R1 < a_L0 + a_R0.
  TargetAmplitudes(double a_L0, double a_L1, double a_R0, double a_R1);

  /// Builds targets from effective couplings G_jk = sqrt(2) g A_jk.
  static TargetAmplitudes from_couplings(double G_L0, double G_L1, double G_R0, double G_R1,
                                         double g);

  double a_L0() const { return a_L0_; }
  double a_L1() const { return a_L1_; }
  double a_R0() const { return a_R0_; }
  double a_R1() const { return a_R1_; }

  /// (A_L1 + A_R1) / (A_L0 + A_R0)
  double ratio() const { return (a_L1_ + a_R1_) / (a_L0_ + a_R0_); }

  /// A_R0^2 + A_R1^2 - A_L0^2 - A_L1^2
  double power_imbalance() const {
    return a_R0_ * a_R0_ + a_R1_ * a_R1_ - a_L0_ * a_L0_ - a_L1_ * a_L1_;
  }
  /// A_R0 A_R1 - A_L0 A_L1
  double beat_imbalance() const { return a_R0_ * a_R1_ - a_L0_ * a_L1_; }

  TargetAmplitudes scaled(double factor) const;
  /// Swaps the roles of the two cavities.
  TargetAmplitudes mirrored() const { return {a_R0_, a_R1_, a_L0_, a_L1_}; }

 private:
  double a_L0_, a_L1_, a_R0_, a_R1_;
};

}  // namespace optomod
