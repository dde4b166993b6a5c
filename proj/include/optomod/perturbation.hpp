#pragma once

#include <array>
#include <vector>

#include "optomod/meanfield.hpp"
#include "optomod/model.hpp"

namespace optomod {

/// Coefficients O_{n,l} of the double expansion
///   <O(t)> = sum_l sum_n O_{n,l} exp(-i n Omega t) g^l
/// for O in {Q, P, A_L, A_R}. The coefficients do not contain g; eval_series
/// applies the powers of g.
class FourierCoeffTable {
 public:
  FourierCoeffTable(int n_max, int l_max, double omega_mod);

  int n_max() const { return n_max_; }
  int l_max() const { return l_max_; }
  double omega_mod() const { return omega_mod_; }

  /// Zero outside the stored truncation.
  cplx coeff(MeanVariable v, int n, int l) const;
  void set(MeanVariable v, int n, int l, cplx value);

 private:
  std::size_t index(MeanVariable v, int n, int l) const;

  int n_max_;
  int l_max_;
  double omega_mod_;
  std::vector<cplx> data_;
};

/// l = 0 slice: cavities respond linearly to the drives, Q and P vanish.
/// Throws SingularDenominator when the 2x2 cavity determinant is below 1e-12.
FourierCoeffTable zero_order_coeffs(const SystemParams& params, const DriveSpec& drive_L,
                                    const DriveSpec& drive_R, int n_max);

/// Fills orders 1..l_max. Each order solves the coupled cavity pair as a
/// 2x2 complex system per harmonic; convolutions are clipped to |n| <= n_max.
FourierCoeffTable recursive_coeffs(const SystemParams& params, const DriveSpec& drive_L,
                                   const DriveSpec& drive_R, int n_max, int l_max);

MeanState eval_series(const FourierCoeffTable& table, double g, double t);

/// Time derivative of eval_series, term by term.
MeanState eval_series_rate(const FourierCoeffTable& table, double g, double t);

/// Relative sup-norm distance between an integrated series and the
/// perturbative closed form over the final period, taken over the Re and Im
/// parts of `variables`.
double final_period_deviation(const MeanSeries& series, const FourierCoeffTable& table, double g,
                              std::span<const MeanVariable> variables = kAllMeanVariables);

}  // namespace optomod
