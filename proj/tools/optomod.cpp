#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "optomod/config.hpp"
#include "optomod/scenario.hpp"

extern char** environ;

namespace {

using namespace optomod;

struct Flags {
  std::string config;
  std::string out;
  std::string grid;
  std::string quantity;
  std::optional<double> fixed_step;
  std::vector<std::string> overrides;
  int workers = 0;
  int verbosity = 0;
  bool verify = false;
};

std::vector<std::string> environment() {
  std::vector<std::string> env;
  for (char** e = environ; e && *e; ++e) env.emplace_back(*e);
  return env;
}

ScenarioConfig load(const Flags& f) {
  if (f.config.empty()) throw Error(ErrorKind::Parse, "no config given (positional, --config or OPTOMOD_CONFIG)");
  std::ifstream in(f.config);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + f.config + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ConfigDocument doc = parse_document(buf.str(), f.config);
  apply_env_overrides(doc, environment());
  for (const auto& o : f.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "--set expects section.key=value, got '" + o + "'");
    set_override(doc, o.substr(0, eq), o.substr(eq + 1));
  }
  if (!f.grid.empty()) set_override(doc, "simulation.grid", f.grid);
  if (!f.quantity.empty()) set_override(doc, "simulation.quantity", f.quantity);
  if (f.fixed_step) set_override(doc, "simulation.fixed_step", std::to_string(*f.fixed_step));
  if (f.verify) set_override(doc, "simulation.verify", "true");
  return build_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field, fluctuation and sweep runs for the amplitude-modulated three-mode optomechanical system"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "scenario config file")->envname("OPTOMOD_CONFIG");
  app.add_option("--out", f.out, "output path prefix (files are <prefix>_<kind>.csv)")
      ->envname("OPTOMOD_OUT");
  app.add_option("--grid", f.grid, "sweep grid a:b:n (inclusive endpoints)")->envname("OPTOMOD_GRID");
  app.add_option("--quantity", f.quantity, "sweep quantity: sigma11_min or en_max")
      ->envname("OPTOMOD_QUANTITY");
  app.add_option("--workers", f.workers, "sweep worker threads (0 = logical cores)")
      ->envname("OPTOMOD_WORKERS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--fixed-step", f.fixed_step, "use classical RK4 with this step instead of adaptive steps")
      ->envname("OPTOMOD_FIXED_STEP")
      ->check(CLI::PositiveNumber);
  app.add_option("--set", f.overrides, "override a config key, section.key=value (repeatable)");
  app.add_flag("-v,--verbose", f.verbosity, "progress lines on stderr (repeat for more)");
  app.footer(
      "Config keys can also be overridden from the environment as OPTOMOD_<SECTION>_<KEY>,\n"
      "e.g. OPTOMOD_SYSTEM_KAPPA=0.05 or OPTOMOD_DRIVE_LEFT_EM1=3.5e4 (Em1 = E-1).\n"
      "Exit codes: 0 ok, 1 internal, 2 parse, 3 validation, 4 step-size underflow, 5 diverged,\n"
      "6 insufficient data, 7 singular denominator, 8 resonant denominator, 9 non-real mean,\n"
      "10 invalid CM, 11 not converged, 12 eigen failure, 13 unstable ratio, 14 I/O.");

  const std::pair<Command, const char*> commands[] = {
      {Command::Mean, "integrate the classical means and report limit-cycle convergence"},
      {Command::Perturb, "perturbative Fourier coefficient table and its series"},
      {Command::Design, "drives that realise the [targets] limit cycle"},
      {Command::Fluct, "covariance-matrix orbit (final periods), sigma11 and E_N"},
      {Command::Stability, "stability verdict of the fluctuation drift"},
      {Command::Sweep, "sigma11_min or en_max versus modulation frequency"},
      {Command::Bogoliubov, "effective-model quantities and the optimal modulation frequency"},
  };
  std::optional<Command> chosen;
  for (const auto& [cmd, help] : commands) {
    auto* sub = app.add_subcommand(to_string(cmd), help);
    sub->add_option("config", f.config, "scenario config file");
    if (cmd == Command::Design) sub->add_flag("--verify", f.verify, "integrate the designed drives and compare");
    sub->callback([&chosen, cmd = cmd] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorKind::Parse);
  }

  try {
    const ScenarioConfig cfg = load(f);
    RunOptions opt;
    opt.out_prefix = f.out;
    opt.workers = f.workers;
    opt.verbosity = f.verbosity;
    const RunResult res = run_scenario(cfg, *chosen, opt, std::cerr);
    std::cout << res.report;
    for (const auto& file : res.files) std::cout << "wrote " << file << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
