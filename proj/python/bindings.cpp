#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "optomod/bogoliubov.hpp"
#include "optomod/config.hpp"
#include "optomod/drive_design.hpp"
#include "optomod/fluctuations.hpp"
#include "optomod/measures.hpp"
#include "optomod/perturbation.hpp"
#include "optomod/scenario.hpp"

namespace py = pybind11;
using namespace optomod;

namespace {

IntegratorControls make_controls(int samples_per_period, std::optional<double> fixed_step,
                                 double abs_tol, double rel_tol) {
  IntegratorControls c;
  c.samples_per_period = samples_per_period;
  c.fixed_step = fixed_step;
  c.abs_tol = abs_tol;
  c.rel_tol = rel_tol;
  return c;
}

std::vector<MeanVariable> variables_from(const std::string& name) {
  if (name == "cavity") return {kCavityMeanVariables.begin(), kCavityMeanVariables.end()};
  if (name == "mechanical") return {kMechanicalMeanVariables.begin(), kMechanicalMeanVariables.end()};
  if (name == "all") return {kAllMeanVariables.begin(), kAllMeanVariables.end()};
  throw Error(ErrorKind::Validation, "variables must be cavity, mechanical or all");
}

MeanVariable variable_from(const std::string& name) {
  for (const auto v : kAllMeanVariables)
    if (name == to_string(v)) return v;
  throw Error(ErrorKind::Validation, "unknown variable '" + name + "'");
}

py::array_t<cplx> column(const MeanSeries& s, MeanVariable v) {
  py::array_t<cplx> out(static_cast<py::ssize_t>(s.size()));
  auto buf = out.mutable_unchecked<1>();
  for (std::size_t k = 0; k < s.size(); ++k) buf(k) = component(s.states[k], v);
  return out;
}

py::array_t<double> stack(const CovSeries& s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{6}, py::ssize_t{6}});
  auto buf = out.mutable_unchecked<3>();
  for (std::size_t k = 0; k < s.size(); ++k)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) buf(k, i, j) = s.matrices[k](i, j);
  return out;
}

MeanSource source_for(const SystemParams& p, double omega_mod,
                      const std::optional<TargetAmplitudes>& targets,
                      const std::shared_ptr<MeanSeries>& series) {
  if (targets.has_value() == static_cast<bool>(series))
    throw Error(ErrorKind::Validation, "give exactly one of targets or series");
  if (targets) return asymptotic_source(*targets, p, omega_mod);
  return series_source(series);
}

}  // namespace

PYBIND11_MODULE(_optomod, m) {
  m.doc() = "Simulation core for the amplitude-modulated membrane-in-the-middle system";

  // messages start with the error class name, e.g. "ValidationError: ..."
  py::register_exception<Error>(m, "OptomodError", PyExc_RuntimeError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](double kappa, double gamma_m, double J, double delta_L, double delta_R,
                       double g, double n_bar_a, double n_bar_m, double omega_m) {
             SystemParams p;
             p.kappa = kappa;
             p.gamma_m = gamma_m;
             p.J = J;
             p.delta_L = delta_L;
             p.delta_R = delta_R;
             p.g = g;
             p.n_bar_a = n_bar_a;
             p.n_bar_m = n_bar_m;
             p.omega_m = omega_m;
             p.validate();
             return p;
           }),
           py::arg("kappa"), py::arg("gamma_m"), py::arg("J"), py::arg("delta_L"),
           py::arg("delta_R"), py::arg("g"), py::arg("n_bar_a") = 0.0, py::arg("n_bar_m") = 0.0,
           py::arg("omega_m") = 1.0)
      .def_readwrite("omega_m", &SystemParams::omega_m)
      .def_readwrite("kappa", &SystemParams::kappa)
      .def_readwrite("gamma_m", &SystemParams::gamma_m)
      .def_readwrite("J", &SystemParams::J)
      .def_readwrite("delta_L", &SystemParams::delta_L)
      .def_readwrite("delta_R", &SystemParams::delta_R)
      .def_readwrite("g", &SystemParams::g)
      .def_readwrite("n_bar_a", &SystemParams::n_bar_a)
      .def_readwrite("n_bar_m", &SystemParams::n_bar_m)
      .def("validate", &SystemParams::validate)
      .def("low_quality_factor", &SystemParams::low_quality_factor);

  py::class_<DriveSpec>(m, "DriveSpec")
      .def(py::init<double, std::map<int, cplx>>(), py::arg("omega_mod"), py::arg("harmonics"))
      .def_property_readonly("omega_mod", &DriveSpec::omega_mod)
      .def_property_readonly("harmonics", &DriveSpec::harmonics)
      .def_property_readonly("period", &DriveSpec::period)
      .def("coefficient", &DriveSpec::coefficient)
      .def("__call__", [](const DriveSpec& d, double t) { return d(t); });

  py::class_<TargetAmplitudes>(m, "TargetAmplitudes")
      .def(py::init<double, double, double, double>(), py::arg("a_L0"), py::arg("a_L1"),
           py::arg("a_R0"), py::arg("a_R1"))
      .def_static("from_couplings", &TargetAmplitudes::from_couplings, py::arg("G_L0"),
                  py::arg("G_L1"), py::arg("G_R0"), py::arg("G_R1"), py::arg("g"))
      .def_property_readonly("a_L0", &TargetAmplitudes::a_L0)
      .def_property_readonly("a_L1", &TargetAmplitudes::a_L1)
      .def_property_readonly("a_R0", &TargetAmplitudes::a_R0)
      .def_property_readonly("a_R1", &TargetAmplitudes::a_R1)
      .def("ratio", &TargetAmplitudes::ratio);

  py::class_<MeanState>(m, "MeanState")
      .def(py::init([](double t, cplx q, cplx p, cplx a_L, cplx a_R) {
             return MeanState{t, q, p, a_L, a_R};
           }),
           py::arg("t") = 0.0, py::arg("q") = cplx{}, py::arg("p") = cplx{},
           py::arg("a_L") = cplx{}, py::arg("a_R") = cplx{})
      .def_readwrite("t", &MeanState::t)
      .def_readwrite("q", &MeanState::q)
      .def_readwrite("p", &MeanState::p)
      .def_readwrite("a_L", &MeanState::a_L)
      .def_readwrite("a_R", &MeanState::a_R);

  py::class_<MeanSeries, std::shared_ptr<MeanSeries>>(m, "MeanSeries")
      .def_property_readonly("times",
                             [](const MeanSeries& s) { return py::array_t<double>(s.times.size(), s.times.data()); })
      .def_property_readonly("q", [](const MeanSeries& s) { return column(s, MeanVariable::Q); })
      .def_property_readonly("p", [](const MeanSeries& s) { return column(s, MeanVariable::P); })
      .def_property_readonly("a_L", [](const MeanSeries& s) { return column(s, MeanVariable::AL); })
      .def_property_readonly("a_R", [](const MeanSeries& s) { return column(s, MeanVariable::AR); })
      .def("interpolate", &MeanSeries::interpolate)
      .def("__len__", &MeanSeries::size);

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("converged", &ConvergenceReport::converged)
      .def_readonly("periods_needed", &ConvergenceReport::periods_needed)
      .def_readonly("final_residual", &ConvergenceReport::final_residual)
      .def_readonly("residuals", &ConvergenceReport::residuals);

  m.def(
      "integrate_means",
      [](const SystemParams& p, const DriveSpec& L, const DriveSpec& R, double t_end,
         const MeanState& init, int samples_per_period, std::optional<double> fixed_step,
         double abs_tol, double rel_tol) {
        py::gil_scoped_release release;
        return std::make_shared<MeanSeries>(integrate_means(
            p, L, R, init, t_end, make_controls(samples_per_period, fixed_step, abs_tol, rel_tol)));
      },
      py::arg("params"), py::arg("drive_L"), py::arg("drive_R"), py::arg("t_end"),
      py::arg("init") = MeanState{}, py::arg("samples_per_period") = 256,
      py::arg("fixed_step") = py::none(), py::arg("abs_tol") = 1e-9, py::arg("rel_tol") = 1e-9);

  m.def(
      "detect_limit_cycle",
      [](const MeanSeries& s, double omega_mod, double threshold, const std::string& variables) {
        const auto vars = variables_from(variables);
        return detect_limit_cycle(s, omega_mod, threshold, vars);
      },
      py::arg("series"), py::arg("omega_mod"), py::arg("threshold") = 1e-3,
      py::arg("variables") = "all");

  m.def(
      "fourier_extract",
      [](const MeanSeries& s, double omega_mod, int n_max) {
        const auto h = fourier_extract(s, omega_mod, n_max);
        py::dict out;
        for (std::size_t v = 0; v < 4; ++v) out[to_string(kAllMeanVariables[v])] = h[v];
        return out;
      },
      py::arg("series"), py::arg("omega_mod"), py::arg("n_max"));

  py::class_<FourierCoeffTable>(m, "FourierCoeffTable")
      .def_property_readonly("n_max", &FourierCoeffTable::n_max)
      .def_property_readonly("l_max", &FourierCoeffTable::l_max)
      .def("coeff", [](const FourierCoeffTable& t, const std::string& v, int n, int l) {
        return t.coeff(variable_from(v), n, l);
      });
  m.def("recursive_coeffs", &recursive_coeffs, py::arg("params"), py::arg("drive_L"),
        py::arg("drive_R"), py::arg("n_max") = 2, py::arg("l_max") = 6);
  m.def("eval_series", &eval_series, py::arg("table"), py::arg("g"), py::arg("t"));

  py::class_<DesignedDrives>(m, "DesignedDrives")
      .def_readonly("drive_L", &DesignedDrives::drive_L)
      .def_readonly("drive_R", &DesignedDrives::drive_R);
  py::class_<RoundTripReport>(m, "RoundTripReport")
      .def_readonly("max_rel_error", &RoundTripReport::max_rel_error)
      .def_readonly("periods_to_converge", &RoundTripReport::periods_to_converge)
      .def_readonly("extracted", &RoundTripReport::extracted);
  m.def("design_drives", &design_drives, py::arg("targets"), py::arg("params"), py::arg("omega_mod"));
  m.def(
      "verify_roundtrip",
      [](const TargetAmplitudes& t, const SystemParams& p, double omega_mod, int periods) {
        py::gil_scoped_release release;
        return verify_roundtrip(t, p, omega_mod, {}, periods);
      },
      py::arg("targets"), py::arg("params"), py::arg("omega_mod"), py::arg("periods") = 400);
  m.def(
      "asymptotic_means",
      [](const TargetAmplitudes& t, const SystemParams& p, double omega_mod, double time) {
        return asymptotic_means(t, p, omega_mod, time);
      },
      py::arg("targets"), py::arg("params"), py::arg("omega_mod"), py::arg("t"));

  m.def("drift_matrix", &drift_matrix, py::arg("params"), py::arg("mean"), py::arg("imag_tol") = 1e-6);
  m.def("diffusion_matrix", &diffusion_matrix, py::arg("params"));
  m.def(
      "thermal_cm", [](double n_m, double n_a) { return CovMatrix::thermal(n_m, n_a).entries; },
      py::arg("n_bar_m") = 0.0, py::arg("n_bar_a") = 0.0);

  m.def(
      "integrate_cm_to_periodic",
      [](const SystemParams& p, double omega_mod, std::optional<TargetAmplitudes> targets,
         std::shared_ptr<MeanSeries> series, int max_periods, double tol, int keep_periods) {
        const MeanSource src = source_for(p, omega_mod, targets, series);
        const CovMatrix s0 = CovMatrix::thermal(p.n_bar_m, p.n_bar_a);
        PeriodicCovOrbit orbit;
        {
          py::gil_scoped_release release;
          orbit = integrate_cm_to_periodic(p, src, omega_mod, s0, 0.0, max_periods, tol, {},
                                           keep_periods);
        }
        py::dict out;
        out["times"] = orbit.tail.times;
        out["sigma"] = stack(orbit.tail);
        out["periods"] = orbit.periods;
        out["residual"] = orbit.residual;
        out["converged"] = orbit.converged;
        return out;
      },
      py::arg("params"), py::arg("omega_mod"), py::arg("targets") = py::none(),
      py::arg("series") = nullptr, py::arg("max_periods") = 600, py::arg("tol") = 1e-5,
      py::arg("keep_periods") = 2);

  m.def(
      "stability",
      [](const SystemParams& p, double omega_mod, std::optional<TargetAmplitudes> targets,
         std::shared_ptr<MeanSeries> series, double t0, int n_samples) {
        const MeanSource src = source_for(p, omega_mod, targets, series);
        const auto scan = stability_scan(p, src, omega_mod, n_samples, t0);
        const auto floq = floquet_analysis(p, src, omega_mod, t0);
        py::dict out;
        out["max_real_eig"] = scan.max_real_eig;
        out["pointwise_stable"] = scan.stable;
        out["floquet_radius"] = floq.spectral_radius;
        out["floquet_stable"] = floq.stable;
        return out;
      },
      py::arg("params"), py::arg("omega_mod"), py::arg("targets") = py::none(),
      py::arg("series") = nullptr, py::arg("t0") = 0.0, py::arg("n_samples") = 128);

  m.def("log_negativity", &log_negativity, py::arg("sigma_r"));
  m.def(
      "symplectic_eigenvalues",
      [](const Eigen::MatrixXd& s) { return symplectic_eigenvalues(s); }, py::arg("sigma"));

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("omega_mod", &SweepRow::omega_mod)
      .def_readonly("sigma11_min", &SweepRow::sigma11_min)
      .def_readonly("en_max", &SweepRow::en_max)
      .def_readonly("stable", &SweepRow::stable)
      .def_readonly("converged", &SweepRow::converged)
      .def_readonly("periods", &SweepRow::periods)
      .def_readonly("error", &SweepRow::error);
  m.def(
      "sweep_omega",
      [](const std::vector<double>& grid, const SystemParams& p, const TargetAmplitudes& t,
         int max_periods, int workers) {
        SweepScenario sc;
        sc.params = p;
        sc.targets = t;
        sc.max_periods = max_periods;
        py::gil_scoped_release release;
        return sweep_omega(grid, sc, workers);
      },
      py::arg("grid"), py::arg("params"), py::arg("targets"), py::arg("max_periods") = 600,
      py::arg("workers") = 0);

  py::class_<EffectiveModel>(m, "EffectiveModel")
      .def_readonly("delta3", &EffectiveModel::delta3)
      .def_readonly("delta4", &EffectiveModel::delta4)
      .def_readonly("r", &EffectiveModel::r)
      .def_readonly("chi", &EffectiveModel::chi)
      .def_readonly("omega_opt", &EffectiveModel::omega_opt)
      .def_readonly("ratio", &EffectiveModel::ratio);
  m.def("effective_model", &effective_model, py::arg("params"), py::arg("targets"));

  m.def(
      "run",
      [](const std::string& command, const std::string& config_path, const std::string& out_prefix) {
        const std::pair<const char*, Command> names[] = {
            {"mean", Command::Mean},   {"perturb", Command::Perturb},
            {"design", Command::Design}, {"fluct", Command::Fluct},
            {"stability", Command::Stability}, {"sweep", Command::Sweep},
            {"bogoliubov", Command::Bogoliubov}};
        for (const auto& [name, cmd] : names) {
          if (command != name) continue;
          const ScenarioConfig cfg = parse_config(config_path);
          RunOptions opt;
          opt.out_prefix = out_prefix;
          std::ostringstream log;
          RunResult res;
          {
            py::gil_scoped_release release;
            res = run_scenario(cfg, cmd, opt, log);
          }
          py::dict out;
          out["files"] = res.files;
          out["report"] = res.report;
          out["log"] = log.str();
          return out;
        }
        throw Error(ErrorKind::Validation, "unknown command '" + command + "'");
      },
      py::arg("command"), py::arg("config"), py::arg("out_prefix") = "");
}
