#pragma once

// Thin sampling driver over Boost.Odeint shared by the mean-field and
// covariance integrators.

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "optomod/errors.hpp"

namespace optomod {

struct IntegratorControls {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  /// When set, classical RK4 with a step no larger than this is used instead
  /// of adaptive Dormand-Prince 5(4).
  std::optional<double> fixed_step;
  int samples_per_period = 256;
  /// Any state component larger than this in magnitude raises Diverged.
  double max_magnitude = 1e12;
};

namespace detail {

template <std::size_t N>
void check_bound(const std::array<double, N>& x, double t, double bound) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > bound) {
      std::ostringstream os;
      os << "state magnitude exceeded " << bound << " at t = " << t;
      throw Error(ErrorKind::Diverged, os.str());
    }
  }
}

/// Integrates x' = rhs(x, t) from times.front() and calls
/// observe(x, t, index) at every entry of `times` (strictly increasing,
/// times.front() is the initial time).
template <std::size_t N, class Rhs, class Observer>
void integrate_sampled(Rhs&& rhs, std::array<double, N> x, const std::vector<double>& times,
                       const IntegratorControls& controls, Observer&& observe) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, N>;
  if (times.empty()) return;

  auto system = [&rhs](const State& s, State& ds, double t) { rhs(s, ds, t); };

  if (controls.fixed_step) {
    const double h_max = *controls.fixed_step;
    if (!(h_max > 0.0)) throw Error(ErrorKind::Validation, "fixed step must be > 0");
    ode::runge_kutta4<State> stepper;
    check_bound(x, times.front(), controls.max_magnitude);
    observe(x, times.front(), std::size_t{0});
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double span = times[k] - times[k - 1];
      const auto substeps = static_cast<long>(std::ceil(span / h_max - 1e-9));
      const double h = span / static_cast<double>(std::max(1L, substeps));
      double t = times[k - 1];
      for (long s = 0; s < std::max(1L, substeps); ++s) {
        stepper.do_step(system, x, t, h);
        t = times[k - 1] + static_cast<double>(s + 1) * h;
      }
      check_bound(x, times[k], controls.max_magnitude);
      observe(x, times[k], k);
    }
    return;
  }

  auto stepper = ode::make_dense_output(controls.abs_tol, controls.rel_tol,
                                        ode::runge_kutta_dopri5<State>());
  const double dt0 = times.size() > 1 ? 0.25 * (times[1] - times[0]) : 1e-3;
  std::size_t index = 0;
  auto observer = [&](const State& s, double t) {
    check_bound(s, t, controls.max_magnitude);
    observe(s, t, index++);
  };
  try {
    ode::integrate_times(stepper, system, x, times.begin(), times.end(), dt0, observer,
                         ode::max_step_checker(100000));
  } catch (const ode::step_adjustment_error& e) {
    throw Error(ErrorKind::StepSizeUnderflow, e.what());
  } catch (const ode::no_progress_error& e) {
    throw Error(ErrorKind::StepSizeUnderflow, e.what());
  }
}

/// Uniform grid t0, t0 + h, ..., with `count` intervals.
inline std::vector<double> uniform_grid(double t0, double h, std::size_t count) {
  std::vector<double> grid(count + 1);
  for (std::size_t k = 0; k <= count; ++k) grid[k] = t0 + static_cast<double>(k) * h;
  return grid;
}

}  // namespace detail
}  // namespace optomod
