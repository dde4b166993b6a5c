#include "optomod/scenario.hpp"

#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "optomod/bogoliubov.hpp"
#include "optomod/csv.hpp"
#include "optomod/drive_design.hpp"
#include "optomod/fluctuations.hpp"
#include "optomod/measures.hpp"
#include "optomod/perturbation.hpp"

namespace optomod {

const char* to_string(Command c) {
  switch (c) {
    case Command::Mean: return "mean";
    case Command::Perturb: return "perturb";
    case Command::Design: return "design";
    case Command::Fluct: return "fluct";
    case Command::Stability: return "stability";
    case Command::Sweep: return "sweep";
    case Command::Bogoliubov: return "bogoliubov";
  }
  return "?";
}

namespace {

class Report {
 public:
  template <class T>
  Report& kv(const std::string& key, const T& value) {
    os_ << std::left << std::setw(22) << key << ' ' << value << '\n';
    return *this;
  }
  Report& num(const std::string& key, double v) { return kv(key, format_double(v)); }
  Report& line(const std::string& text) {
    os_ << text << '\n';
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::string prefix_of(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (!opt.out_prefix.empty()) return opt.out_prefix;
  if (!cfg.output_prefix.empty()) return cfg.output_prefix;
  return "optomod";
}

const std::pair<DriveSpec, DriveSpec>& need_drives(const ScenarioConfig& cfg, Command c) {
  if (!cfg.drives)
    throw Error(ErrorKind::Validation,
                std::string(to_string(c)) + " needs [drive.left] and [drive.right]");
  return *cfg.drives;
}

const TargetAmplitudes& need_targets(const ScenarioConfig& cfg, Command c) {
  if (!cfg.targets) throw Error(ErrorKind::Validation, std::string(to_string(c)) + " needs [targets]");
  return *cfg.targets;
}

std::vector<MeanVariable> selected_variables(const std::string& name) {
  if (name == "mechanical") return {kMechanicalMeanVariables.begin(), kMechanicalMeanVariables.end()};
  if (name == "all") return {kAllMeanVariables.begin(), kAllMeanVariables.end()};
  return {kCavityMeanVariables.begin(), kCavityMeanVariables.end()};
}

double tau_of(const ScenarioConfig& cfg) { return 2.0 * std::numbers::pi / cfg.simulation.omega_mod; }

// extra_periods pads the series past the CM horizon: dense-output steps
// may evaluate the means slightly beyond the last sample time
std::shared_ptr<const MeanSeries> integrate_scenario_means(const ScenarioConfig& cfg, Command c,
                                                           int extra_periods = 0) {
  const auto& [L, R] = need_drives(cfg, c);
  const auto& sim = cfg.simulation;
  MeanState init;
  if (sim.init == InitialMeans::Series) {
    const auto table = recursive_coeffs(cfg.system, L, R, sim.n_max, sim.l_max);
    init = eval_series(table, cfg.system.g, 0.0);
  }
  return std::make_shared<const MeanSeries>(
      integrate_means(cfg.system, L, R, init, (sim.t_end_periods + extra_periods) * tau_of(cfg),
                      sim.controls()));
}

struct Source {
  MeanSource means;
  double t0 = 0.0;  ///< start of a window where the means are settled
  std::string mode;
};

Source scenario_source(const ScenarioConfig& cfg, Command c) {
  if (cfg.drives && cfg.targets)
    throw Error(ErrorKind::Validation,
                std::string(to_string(c)) + " takes either drives or targets, not both");
  if (cfg.targets)
    return {asymptotic_source(*cfg.targets, cfg.system, cfg.simulation.omega_mod), 0.0,
            "targets (asymptotic)"};
  const auto series = integrate_scenario_means(cfg, c, 1);
  return {series_source(series), (cfg.simulation.t_end_periods - 1) * tau_of(cfg),
          "drives (integrated)"};
}

std::vector<std::string> mean_header() {
  return {"t", "q_re", "q_im", "p_re", "p_im", "a_L_re", "a_L_im", "a_R_re", "a_R_im"};
}

void mean_row(CsvWriter& w, const MeanState& s) {
  w.cell(s.t).cell(s.q).cell(s.p).cell(s.a_L).cell(s.a_R).end_row();
}

RunResult run_mean(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const auto series = integrate_scenario_means(cfg, Command::Mean);
  const auto vars = selected_variables(cfg.simulation.variables);
  const auto conv = detect_limit_cycle(*series, cfg.simulation.omega_mod,
                                       cfg.simulation.convergence_threshold, vars);
  if (opt.verbosity >= 1)
    for (std::size_t k = 0; k < conv.residuals.size(); ++k)
      log << "period " << k + 1 << " residual " << format_double(conv.residuals[k]) << '\n';

  RunResult res;
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_mean.csv", mean_header());
  for (const auto& s : series->states) mean_row(w, s);
  w.close();
  CsvWriter cw(prefix + "_convergence.csv", {"period", "residual"});
  for (std::size_t k = 0; k < conv.residuals.size(); ++k)
    cw.cell(static_cast<int>(k + 1)).cell(conv.residuals[k]).end_row();
  cw.close();
  res.files = {w.path(), cw.path()};

  Report r;
  r.kv("periods_integrated", cfg.simulation.t_end_periods)
      .kv("variables", cfg.simulation.variables)
      .num("threshold", conv.threshold)
      .kv("converged", conv.converged ? "true" : "false")
      .kv("periods_needed", conv.periods_needed)
      .num("final_residual", conv.final_residual);
  try {
    const auto& [L, R] = *cfg.drives;
    const auto table = recursive_coeffs(cfg.system, L, R, cfg.simulation.n_max, cfg.simulation.l_max);
    r.num("series_deviation", final_period_deviation(*series, table, cfg.system.g, vars));
  } catch (const Error& e) {
    r.kv("series_deviation", std::string("n/a (") + e.what() + ")");
  }
  res.report = r.str();
  return res;
}

RunResult run_perturb(const ScenarioConfig& cfg, const RunOptions& opt) {
  const auto& [L, R] = need_drives(cfg, Command::Perturb);
  const auto& sim = cfg.simulation;
  const auto table = recursive_coeffs(cfg.system, L, R, sim.n_max, sim.l_max);
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_coeffs.csv", {"n", "l", "variable", "value_re", "value_im"});
  for (int l = 0; l <= table.l_max(); ++l)
    for (int n = -table.n_max(); n <= table.n_max(); ++n)
      for (const auto v : kAllMeanVariables)
        w.cell(n).cell(l).cell(std::string(to_string(v))).cell(table.coeff(v, n, l)).end_row();
  w.close();
  CsvWriter sw(prefix + "_series.csv", mean_header());
  const double tau = tau_of(cfg);
  for (int k = 0; k <= sim.samples_per_period; ++k)
    mean_row(sw, eval_series(table, cfg.system.g, tau * k / sim.samples_per_period));
  sw.close();

  Report r;
  r.kv("n_max", sim.n_max).kv("l_max", sim.l_max);
  const MeanState s0 = eval_series(table, cfg.system.g, 0.0);
  r.kv("a_L(0)", format_double(s0.a_L.real()) + " " + format_double(s0.a_L.imag()) + "i")
      .kv("a_R(0)", format_double(s0.a_R.real()) + " " + format_double(s0.a_R.imag()) + "i");
  return {{w.path(), sw.path()}, r.str()};
}

RunResult run_design(const ScenarioConfig& cfg, const RunOptions& opt) {
  const auto& tg = need_targets(cfg, Command::Design);
  const double W = cfg.simulation.omega_mod;
  const auto d = design_drives(tg, cfg.system, W);
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_drives.csv", {"cavity", "n", "E_re", "E_im"});
  Report r;
  for (const auto* side : {"L", "R"}) {
    const DriveSpec& drive = *side == 'L' ? d.drive_L : d.drive_R;
    for (const int n : {-1, 0, 1, 2}) {
      const cplx e = drive.coefficient(n);
      w.cell(std::string(side)).cell(n).cell(e).end_row();
      r.kv(std::string("E_") + side + "(" + std::to_string(n) + ")",
           format_double(e.real()) + " " + format_double(e.imag()) + "i");
    }
  }
  w.close();

  ScenarioConfig follow = cfg;
  follow.targets.reset();
  follow.drives.emplace(d.drive_L, d.drive_R);
  follow.output_prefix = prefix + "_followup";
  const std::string path = prefix + "_followup.cfg";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "# drives designed for a_L0 = " << format_double(tg.a_L0()) << ", a_L1 = "
      << format_double(tg.a_L1()) << ", a_R0 = " << format_double(tg.a_R0())
      << ", a_R1 = " << format_double(tg.a_R1()) << "\n"
      << to_config_text(follow);
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");

  if (cfg.simulation.verify) {
    const auto rt = verify_roundtrip(tg, cfg.system, W, cfg.simulation.controls(),
                                     cfg.simulation.t_end_periods,
                                     cfg.simulation.convergence_threshold);
    r.num("roundtrip_max_rel_err", rt.max_rel_error).kv("roundtrip_periods", rt.periods_to_converge);
  }
  return {{w.path(), path}, r.str()};
}

RunResult run_fluct(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const auto& sim = cfg.simulation;
  const Source src = scenario_source(cfg, Command::Fluct);
  const CovMatrix sigma0 = CovMatrix::thermal(cfg.system.n_bar_m, cfg.system.n_bar_a);
  const auto orbit = integrate_cm_to_periodic(cfg.system, src.means, sim.omega_mod, sigma0, 0.0,
                                              sim.t_end_periods, sim.periodicity_tol,
                                              sim.controls(), sim.keep_periods);

  double nu_min = std::numeric_limits<double>::infinity();
  std::vector<double> en;
  en.reserve(orbit.tail.size());
  for (const auto& m : orbit.tail.matrices) {
    nu_min = std::min(nu_min, symplectic_eigenvalues(m.entries)[0]);
    en.push_back(log_negativity(reduced_cm(m, Subsystem::L, Subsystem::R)));
  }

  std::vector<std::string> header{"t"};
  for (int i = 1; i <= 6; ++i)
    for (int j = i; j <= 6; ++j) header.push_back("s_" + std::to_string(i) + "_" + std::to_string(j));
  header.push_back("sigma11");
  header.push_back("en_LR");
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_fluct.csv", header);
  for (std::size_t k = 0; k < orbit.tail.size(); ++k) {
    const auto& m = orbit.tail.matrices[k];
    w.cell(orbit.tail.times[k]);
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) w.cell(m(i, j));
    w.cell(m(0, 0)).cell(en[k]).end_row();
  }
  w.close();

  Report r;
  r.kv("mean_source", src.mode)
      .kv("periods", orbit.periods)
      .kv("converged", orbit.converged ? "true" : "false")
      .num("residual", orbit.residual)
      .num("nu_min", nu_min)
      .kv("physical", nu_min >= 0.5 - 1e-6 ? "true" : "false");
  if (nu_min < 0.5 - 1e-6)
    log << "warning: smallest symplectic eigenvalue " << format_double(nu_min)
        << " < 1/2; the Brownian damping model does not guarantee a physical state here\n";
  const double tol = std::max(sim.periodicity_tol, 1e-4);
  try {
    const auto s11 = periodic_extrema(orbit.tail.times, position_variance_series(orbit.tail),
                                      sim.omega_mod, tol);
    const auto e = periodic_extrema(orbit.tail.times, en, sim.omega_mod, tol);
    r.num("sigma11_min", s11.min).num("sigma11_max", s11.max).num("en_LR_max", e.max);
  } catch (const Error& e) {
    r.kv("extrema", std::string("n/a (") + e.what() + ")");
  }
  return {{w.path()}, r.str()};
}

RunResult run_stability(const ScenarioConfig& cfg, const RunOptions& opt) {
  const auto& sim = cfg.simulation;
  const Source src = scenario_source(cfg, Command::Stability);
  const auto scan = stability_scan(cfg.system, src.means, sim.omega_mod, sim.stability_samples, src.t0);
  const auto floq = floquet_analysis(cfg.system, src.means, sim.omega_mod, src.t0, sim.controls());
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_stability.csv", {"t", "max_real"});
  for (std::size_t k = 0; k < scan.times.size(); ++k) w.cell(scan.times[k]).cell(scan.max_real[k]).end_row();
  w.close();

  std::ostringstream verdict;
  verdict << "verdict: " << (scan.stable && floq.stable ? "stable" : "unstable")
          << " (max Re eig R(t) = " << format_double(scan.max_real_eig)
          << " at t = " << format_double(scan.worst_t)
          << "; Floquet radius = " << format_double(floq.spectral_radius) << ")";
  Report r;
  r.line(verdict.str())
      .kv("mean_source", src.mode)
      .kv("pointwise_stable", scan.stable ? "true" : "false")
      .kv("floquet_stable", floq.stable ? "true" : "false")
      .num("floquet_exponent", floq.max_exponent);
  return {{w.path()}, r.str()};
}

RunResult run_sweep(const ScenarioConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const auto& sim = cfg.simulation;
  if (!sim.grid) throw Error(ErrorKind::Validation, "sweep needs a grid (--grid a:b:n or simulation.grid)");
  SweepScenario sc;
  sc.params = cfg.system;
  sc.targets = need_targets(cfg, Command::Sweep);
  sc.controls = sim.controls();
  sc.max_periods = sim.t_end_periods;
  sc.periodicity_tol = sim.periodicity_tol;
  sc.stability_samples = sim.stability_samples;
  const auto rows = sweep_omega(sim.grid->points(), sc, opt.workers);

  const bool want_min = sim.quantity == SweepQuantity::Sigma11Min;
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_sweep.csv", {"omega", "value", "stable"});
  const SweepRow* best = nullptr;
  int stable = 0;
  for (const auto& row : rows) {
    const double v = want_min ? row.sigma11_min : row.en_max;
    w.cell(row.omega_mod).cell(v).cell(row.stable).end_row();
    stable += row.stable;
    if (opt.verbosity >= 1 && !row.error.empty())
      log << "omega " << format_double(row.omega_mod) << ": " << row.error << '\n';
    if (std::isnan(v)) continue;
    const double bv = best ? (want_min ? best->sigma11_min : best->en_max) : 0.0;
    if (!best || (want_min ? v < bv : v > bv)) best = &row;
  }
  w.close();

  Report r;
  r.kv("quantity", to_string(sim.quantity))
      .kv("points", rows.size())
      .kv("stable_points", stable);
  if (best) {
    r.num(want_min ? "argmin_omega" : "argmax_omega", best->omega_mod)
        .num(want_min ? "min_value" : "max_value", want_min ? best->sigma11_min : best->en_max);
  }
  return {{w.path()}, r.str()};
}

RunResult run_bogoliubov(const ScenarioConfig& cfg, const RunOptions& opt) {
  const auto m = effective_model(cfg.system, need_targets(cfg, Command::Bogoliubov));
  const std::string prefix = prefix_of(cfg, opt);
  CsvWriter w(prefix + "_bogoliubov.csv",
              {"delta3", "delta4", "r", "chi", "omega_opt", "ratio", "detuning_mismatch",
               "near_unit_ratio"});
  w.cell(m.delta3).cell(m.delta4).cell(m.r).cell(m.chi).cell(m.omega_opt).cell(m.ratio)
      .cell(m.detuning_mismatch).cell(m.near_unit_ratio).end_row();
  w.close();
  Report r;
  r.num("delta3", m.delta3)
      .num("delta4", m.delta4)
      .num("r", m.r)
      .num("chi", m.chi)
      .num("omega_opt", m.omega_opt)
      .num("ratio", m.ratio);
  if (m.detuning_mismatch) r.line("warning: delta_L != delta_R; the effective model assumes equal detunings");
  if (m.near_unit_ratio) r.line("warning: ratio > 0.999, r is large and the orbit is close to unstable");
  return {{w.path()}, r.str()};
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, Command command, const RunOptions& opt,
                       std::ostream& log) {
  if (cfg.system.low_quality_factor() && opt.verbosity >= 0)
    log << "warning: omega_m / gamma_m < 10, the Brownian noise model is questionable\n";
  switch (command) {
    case Command::Mean: return run_mean(cfg, opt, log);
    case Command::Perturb: return run_perturb(cfg, opt);
    case Command::Design: return run_design(cfg, opt);
    case Command::Fluct: return run_fluct(cfg, opt, log);
    case Command::Stability: return run_stability(cfg, opt);
    case Command::Sweep: return run_sweep(cfg, opt, log);
    case Command::Bogoliubov: return run_bogoliubov(cfg, opt);
  }
  throw Error(ErrorKind::Validation, "unknown command");
}

}  // namespace optomod
