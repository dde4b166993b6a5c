#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "optomod/config.hpp"

namespace optomod {

enum class Command { Mean, Perturb, Design, Fluct, Stability, Sweep, Bogoliubov };

const char* to_string(Command c);

struct RunOptions {
  std::string out_prefix;  ///< default: config prefix, else "optomod"
  int workers = 0;         ///< sweep only; 0 = logical cores
  int verbosity = 0;
};

struct RunResult {
  std::vector<std::string> files;
  std::string report;  ///< human-readable summary printed by the CLI
};

/// Runs one subcommand on a validated scenario and writes its CSV files.
/// `log` receives progress lines when verbosity >= 1.
/// Throws the module errors; Validation when the config lacks what the
/// subcommand needs.
RunResult run_scenario(const ScenarioConfig& config, Command command, const RunOptions& options,
                       std::ostream& log);

}  // namespace optomod
