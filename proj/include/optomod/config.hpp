#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optomod/meanfield.hpp"
#include "optomod/measures.hpp"
#include "optomod/model.hpp"

namespace optomod {

/// Raw INI-like document: section -> key -> (value, line). Keys are stored
/// lower-case; section names are lower-case as well.
struct ConfigDocument {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin;
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;

  bool has_section(const std::string& name) const { return sections.count(name) != 0; }
};

enum class InitialMeans { Cold, Series };

struct SweepGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> points() const;
};

/// "a:b:n" with n >= 1; throws Parse on malformed input.
SweepGrid parse_grid(std::string_view text);

struct SimulationSettings {
  double omega_mod = 2.0;
  int t_end_periods = 600;
  int samples_per_period = 256;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  std::optional<double> fixed_step;
  double convergence_threshold = 1e-3;
  std::string variables = "cavity";  ///< cavity | mechanical | all
  InitialMeans init = InitialMeans::Cold;
  double periodicity_tol = 1e-5;
  int keep_periods = 2;
  int stability_samples = 128;
  int n_max = 2;
  int l_max = 6;
  std::optional<SweepGrid> grid;
  SweepQuantity quantity = SweepQuantity::Sigma11Min;
  bool verify = false;  ///< design: also run the round trip

  IntegratorControls controls() const;
};

struct ScenarioConfig {
  SystemParams system;
  std::optional<std::pair<DriveSpec, DriveSpec>> drives;
  std::optional<TargetAmplitudes> targets;
  SimulationSettings simulation;
  std::string output_prefix;
  std::string origin;
};

/// Parses INI text. Comments start with '#' or ';'. Throws Parse with a
/// "origin:line:" prefix on malformed lines or duplicate keys.
ConfigDocument parse_document(std::string_view text, const std::string& origin);

/// Sets section.key = value, replacing any existing entry.
void set_override(ConfigDocument& doc, const std::string& dotted_key, const std::string& value);

/// Applies OPTOMOD_<SECTION>_<KEY> variables from `env` (NAME=VALUE strings).
/// Section dots become underscores: OPTOMOD_DRIVE_LEFT_E1=3.5e4.
void apply_env_overrides(ConfigDocument& doc, const std::vector<std::string>& env);

/// Validates and converts. Throws Parse for a missing [system] section,
/// unknown sections or keys and unreadable numbers; Validation for
/// violated model invariants.
ScenarioConfig build_config(const ConfigDocument& doc);

/// Reads a file, then parse_document + build_config. Throws Io when the
/// file cannot be read.
ScenarioConfig parse_config(const std::string& path);

/// Serialises a scenario so that build_config(parse_document(...)) gives it
/// back; numbers carry 17 significant digits.
std::string to_config_text(const ScenarioConfig& config);

}  // namespace optomod
