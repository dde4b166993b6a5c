#include "optomod/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace optomod {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const std::set<std::string> kSections{"system", "drive.left", "drive.right", "targets",
                                      "simulation", "output"};

// every (section, key) that build_config understands; harmonic keys are
// checked separately
const std::map<std::string, std::set<std::string>> kKeys{
    {"system",
     {"omega_m", "kappa", "gamma_m", "j", "delta", "delta_l", "delta_r", "g", "n_bar_a",
      "n_bar_m"}},
    {"targets", {"a_l0", "a_l1", "a_r0", "a_r1", "g_l0", "g_l1", "g_r0", "g_r1"}},
    {"simulation",
     {"omega_mod", "t_end_periods", "samples_per_period", "abs_tol", "rel_tol", "fixed_step",
      "convergence_threshold", "variables", "init", "periodicity_tol", "keep_periods",
      "stability_samples", "n_max", "l_max", "grid", "quantity", "verify"}},
    {"output", {"prefix"}},
};

[[noreturn]] void fail(ErrorKind kind, const std::string& origin, int line,
                       const std::string& what) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  throw Error(kind, os.str());
}

double to_double(std::string_view text, bool& ok) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  ok = !t.empty() && res.ec == std::errc() && res.ptr == last;
  return v;
}

// "E0", "E-1", "Em1" -> harmonic index
std::optional<int> harmonic_key(const std::string& key) {
  if (key.size() < 2 || key[0] != 'e') return std::nullopt;
  std::string rest = key.substr(1);
  if (rest[0] == 'm') rest[0] = '-';
  int n = 0;
  const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), n);
  if (res.ec != std::errc() || res.ptr != rest.data() + rest.size()) return std::nullopt;
  return n;
}

class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigDocument::Entry* find(const std::string& section, const std::string& key) const {
    const auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  double number(const ConfigDocument::Entry& e, const std::string& key) const {
    bool ok = false;
    const double v = to_double(e.value, ok);
    if (!ok) fail(ErrorKind::Parse, doc_.origin, e.line, key + ": not a number '" + e.value + "'");
    return v;
  }

  void real(const std::string& section, const std::string& key, double& out) const {
    if (const auto* e = find(section, key)) out = number(*e, key);
  }

  void integer(const std::string& section, const std::string& key, int& out) const {
    const auto* e = find(section, key);
    if (!e) return;
    const double v = number(*e, key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
      fail(ErrorKind::Parse, doc_.origin, e->line, key + ": expected an integer");
    out = static_cast<int>(v);
  }

  cplx complex(const ConfigDocument::Entry& e, const std::string& key) const {
    std::string t = trim(e.value);
    if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    const auto comma = t.find(',');
    if (comma == std::string::npos) return {number({t, e.line}, key), 0.0};
    return {number({t.substr(0, comma), e.line}, key), number({t.substr(comma + 1), e.line}, key)};
  }

  int line(const std::string& section, const std::string& key) const {
    const auto* e = find(section, key);
    if (e) return e->line;
    const auto s = doc_.section_lines.find(section);
    return s == doc_.section_lines.end() ? 0 : s->second;
  }

  const ConfigDocument& doc() const { return doc_; }

 private:
  const ConfigDocument& doc_;
};

DriveSpec read_drive(const Reader& rd, const std::string& section, double omega_mod) {
  std::map<int, cplx> harmonics;
  for (const auto& [key, entry] : rd.doc().sections.at(section)) {
    const auto n = harmonic_key(key);
    if (!n) fail(ErrorKind::Parse, rd.doc().origin, entry.line, "unknown key '" + key + "' in [" + section + "]");
    if (harmonics.count(*n))
      fail(ErrorKind::Parse, rd.doc().origin, entry.line, "harmonic " + std::to_string(*n) + " given twice");
    const cplx v = rd.complex(entry, key);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::Validation, rd.doc().origin, entry.line, key + ": drive amplitude must be finite");
    harmonics[*n] = v;
  }
  return DriveSpec(omega_mod, std::move(harmonics));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> SweepGrid::points() const {
  std::vector<double> pts;
  pts.reserve(count);
  if (count == 1) return {start};
  for (int k = 0; k < count; ++k) pts.push_back(start + (stop - start) * k / (count - 1));
  return pts;
}

SweepGrid parse_grid(std::string_view text) {
  const std::string t = trim(text);
  const auto c1 = t.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : t.find(':', c1 + 1);
  if (c2 == std::string::npos) throw Error(ErrorKind::Parse, "grid '" + t + "': expected a:b:n");
  bool ok1 = false, ok2 = false, ok3 = false;
  SweepGrid g;
  g.start = to_double(t.substr(0, c1), ok1);
  g.stop = to_double(t.substr(c1 + 1, c2 - c1 - 1), ok2);
  const double n = to_double(t.substr(c2 + 1), ok3);
  if (!(ok1 && ok2 && ok3) || n < 1 || n != std::floor(n) || n > 1e6)
    throw Error(ErrorKind::Parse, "grid '" + t + "': expected a:b:n with integer n >= 1");
  g.count = static_cast<int>(n);
  if (g.count > 1 && !(g.stop > g.start))
    throw Error(ErrorKind::Validation, "grid '" + t + "': stop must exceed start");
  return g;
}

IntegratorControls SimulationSettings::controls() const {
  IntegratorControls c;
  c.abs_tol = abs_tol;
  c.rel_tol = rel_tol;
  c.fixed_step = fixed_step;
  c.samples_per_period = samples_per_period;
  return c;
}

ConfigDocument parse_document(std::string_view text, const std::string& origin) {
  ConfigDocument doc;
  doc.origin = origin;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(ErrorKind::Parse, origin, line, "unterminated section header");
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (!kSections.count(section)) fail(ErrorKind::Parse, origin, line, "unknown section [" + section + "]");
      if (doc.sections.count(section)) fail(ErrorKind::Parse, origin, line, "duplicate section [" + section + "]");
      doc.sections[section];
      doc.section_lines[section] = line;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Parse, origin, line, "expected key = value");
    if (section.empty()) fail(ErrorKind::Parse, origin, line, "key outside of any section");
    const std::string key = lower(trim(s.substr(0, eq)));
    if (key.empty()) fail(ErrorKind::Parse, origin, line, "empty key");
    auto& entries = doc.sections[section];
    if (entries.count(key)) fail(ErrorKind::Parse, origin, line, "duplicate key '" + key + "'");
    entries[key] = {trim(s.substr(eq + 1)), line};
  }
  return doc;
}

void set_override(ConfigDocument& doc, const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw Error(ErrorKind::Parse, "override '" + dotted_key + "': expected section.key");
  const std::string section = lower(dotted_key.substr(0, dot));
  if (!kSections.count(section)) throw Error(ErrorKind::Parse, "override: unknown section [" + section + "]");
  const std::string key = lower(dotted_key.substr(dot + 1));
  auto& entries = doc.sections[section];
  // drop other spellings of the same harmonic (E-1, Em1)
  if (const auto n = harmonic_key(key); n && section.rfind("drive.", 0) == 0)
    std::erase_if(entries, [&](const auto& e) { return harmonic_key(e.first) == n; });
  entries[key] = {trim(value), 0};
}

void apply_env_overrides(ConfigDocument& doc, const std::vector<std::string>& env) {
  const std::string prefix = "OPTOMOD_";
  for (const auto& kv : env) {
    if (kv.rfind(prefix, 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = lower(kv.substr(prefix.size(), eq - prefix.size()));
    for (const auto& section : kSections) {
      std::string tag = section;
      std::replace(tag.begin(), tag.end(), '.', '_');
      tag += '_';
      if (name.rfind(tag, 0) == 0 && name.size() > tag.size()) {
        set_override(doc, section + "." + name.substr(tag.size()), kv.substr(eq + 1));
        break;
      }
    }
  }
}

ScenarioConfig build_config(const ConfigDocument& doc) {
  if (!doc.has_section("system")) fail(ErrorKind::Parse, doc.origin, 0, "missing [system] section");
  const Reader rd(doc);
  for (const auto& [section, keys] : kKeys) {
    const auto s = doc.sections.find(section);
    if (s == doc.sections.end()) continue;
    for (const auto& [key, entry] : s->second)
      if (!keys.count(key))
        fail(ErrorKind::Parse, doc.origin, entry.line, "unknown key '" + key + "' in [" + section + "]");
  }

  ScenarioConfig cfg;
  cfg.origin = doc.origin;
  SystemParams& p = cfg.system;
  rd.real("system", "omega_m", p.omega_m);
  rd.real("system", "kappa", p.kappa);
  rd.real("system", "gamma_m", p.gamma_m);
  rd.real("system", "j", p.J);
  double delta = 0.0;
  if (rd.find("system", "delta")) {
    rd.real("system", "delta", delta);
    p.delta_L = p.delta_R = delta;
  }
  rd.real("system", "delta_l", p.delta_L);
  rd.real("system", "delta_r", p.delta_R);
  rd.real("system", "g", p.g);
  rd.real("system", "n_bar_a", p.n_bar_a);
  rd.real("system", "n_bar_m", p.n_bar_m);
  try {
    p.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Validation, doc.origin, rd.line("system", ""), e.what());
  }

  SimulationSettings& sim = cfg.simulation;
  rd.real("simulation", "omega_mod", sim.omega_mod);
  rd.integer("simulation", "t_end_periods", sim.t_end_periods);
  rd.integer("simulation", "samples_per_period", sim.samples_per_period);
  rd.real("simulation", "abs_tol", sim.abs_tol);
  rd.real("simulation", "rel_tol", sim.rel_tol);
  if (const auto* e = rd.find("simulation", "fixed_step")) {
    if (lower(e->value) != "none" && !e->value.empty()) sim.fixed_step = rd.number(*e, "fixed_step");
  }
  rd.real("simulation", "convergence_threshold", sim.convergence_threshold);
  rd.real("simulation", "periodicity_tol", sim.periodicity_tol);
  rd.integer("simulation", "keep_periods", sim.keep_periods);
  rd.integer("simulation", "stability_samples", sim.stability_samples);
  rd.integer("simulation", "n_max", sim.n_max);
  rd.integer("simulation", "l_max", sim.l_max);
  if (const auto* e = rd.find("simulation", "variables")) {
    sim.variables = lower(e->value);
    if (sim.variables != "cavity" && sim.variables != "mechanical" && sim.variables != "all")
      fail(ErrorKind::Parse, doc.origin, e->line, "variables: expected cavity, mechanical or all");
  }
  if (const auto* e = rd.find("simulation", "init")) {
    const std::string v = lower(e->value);
    if (v == "cold") sim.init = InitialMeans::Cold;
    else if (v == "series") sim.init = InitialMeans::Series;
    else fail(ErrorKind::Parse, doc.origin, e->line, "init: expected cold or series");
  }
  if (const auto* e = rd.find("simulation", "grid")) {
    try {
      sim.grid = parse_grid(e->value);
    } catch (const Error& err) {
      fail(err.kind(), doc.origin, e->line, err.what());
    }
  }
  if (const auto* e = rd.find("simulation", "quantity")) {
    try {
      sim.quantity = parse_sweep_quantity(lower(e->value));
    } catch (const Error& err) {
      fail(ErrorKind::Parse, doc.origin, e->line, err.what());
    }
  }
  if (const auto* e = rd.find("simulation", "verify")) {
    const std::string v = lower(e->value);
    if (v != "true" && v != "false" && v != "1" && v != "0")
      fail(ErrorKind::Parse, doc.origin, e->line, "verify: expected true or false");
    sim.verify = v == "true" || v == "1";
  }

  auto check = [&](bool ok, const char* key, const std::string& what) {
    if (!ok) fail(ErrorKind::Validation, doc.origin, rd.line("simulation", key), what);
  };
  check(std::isfinite(sim.omega_mod) && sim.omega_mod > 0.0, "omega_mod", "omega_mod must be positive");
  check(sim.t_end_periods >= 2, "t_end_periods", "t_end_periods must be >= 2");
  check(sim.samples_per_period >= 4, "samples_per_period", "samples_per_period must be >= 4");
  check(sim.abs_tol > 0.0 && sim.rel_tol > 0.0, "abs_tol", "tolerances must be positive");
  check(!sim.fixed_step || *sim.fixed_step > 0.0, "fixed_step", "fixed_step must be positive");
  check(sim.convergence_threshold > 0.0, "convergence_threshold", "convergence_threshold must be positive");
  check(sim.periodicity_tol > 0.0, "periodicity_tol", "periodicity_tol must be positive");
  check(sim.keep_periods >= 1, "keep_periods", "keep_periods must be >= 1");
  check(sim.stability_samples >= 32, "stability_samples", "stability_samples must be >= 32");
  check(sim.n_max >= 1 && sim.l_max >= 0, "n_max", "n_max must be >= 1 and l_max >= 0");

  const bool left = doc.has_section("drive.left");
  const bool right = doc.has_section("drive.right");
  if (left != right)
    fail(ErrorKind::Validation, doc.origin, rd.line(left ? "drive.left" : "drive.right", ""),
         "drives come in pairs: give both [drive.left] and [drive.right] (an empty section is a zero drive)");
  if (left)
    cfg.drives.emplace(read_drive(rd, "drive.left", sim.omega_mod),
                       read_drive(rd, "drive.right", sim.omega_mod));

  if (doc.has_section("targets")) {
    const char* a_keys[] = {"a_l0", "a_l1", "a_r0", "a_r1"};
    const char* g_keys[] = {"g_l0", "g_l1", "g_r0", "g_r1"};
    int n_a = 0, n_g = 0;
    double a[4] = {0, 0, 0, 0}, gv[4] = {0, 0, 0, 0};
    for (int k = 0; k < 4; ++k) {
      if (rd.find("targets", a_keys[k])) ++n_a, rd.real("targets", a_keys[k], a[k]);
      if (rd.find("targets", g_keys[k])) ++n_g, rd.real("targets", g_keys[k], gv[k]);
    }
    const int line = rd.line("targets", "");
    if (n_a && n_g) fail(ErrorKind::Parse, doc.origin, line, "give either a_* or G_* targets, not both");
    if (n_a + n_g != 4) fail(ErrorKind::Parse, doc.origin, line, "targets need all four amplitudes");
    if (n_g && !(p.g > 0.0))
      fail(ErrorKind::Validation, doc.origin, line, "G_* targets need g > 0 in [system]");
    try {
      cfg.targets = n_g ? TargetAmplitudes::from_couplings(gv[0], gv[1], gv[2], gv[3], p.g)
                        : TargetAmplitudes(a[0], a[1], a[2], a[3]);
    } catch (const Error& e) {
      fail(ErrorKind::Validation, doc.origin, line, e.what());
    }
  }

  if (const auto* e = rd.find("output", "prefix")) cfg.output_prefix = e->value;
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return build_config(parse_document(buf.str(), path));
}

std::string to_config_text(const ScenarioConfig& c) {
  std::ostringstream os;
  const SystemParams& p = c.system;
  os << "[system]\n"
     << "omega_m = " << fmt(p.omega_m) << "\n"
     << "kappa = " << fmt(p.kappa) << "\n"
     << "gamma_m = " << fmt(p.gamma_m) << "\n"
     << "J = " << fmt(p.J) << "\n"
     << "delta_L = " << fmt(p.delta_L) << "\n"
     << "delta_R = " << fmt(p.delta_R) << "\n"
     << "g = " << fmt(p.g) << "\n"
     << "n_bar_a = " << fmt(p.n_bar_a) << "\n"
     << "n_bar_m = " << fmt(p.n_bar_m) << "\n";
  if (c.drives) {
    auto drive = [&](const char* name, const DriveSpec& d) {
      os << "\n[" << name << "]\n";
      for (const auto& [n, e] : d.harmonics())
        os << "E" << n << " = " << fmt(e.real()) << ", " << fmt(e.imag()) << "\n";
    };
    drive("drive.left", c.drives->first);
    drive("drive.right", c.drives->second);
  }
  if (c.targets) {
    os << "\n[targets]\n"
       << "a_L0 = " << fmt(c.targets->a_L0()) << "\n"
       << "a_L1 = " << fmt(c.targets->a_L1()) << "\n"
       << "a_R0 = " << fmt(c.targets->a_R0()) << "\n"
       << "a_R1 = " << fmt(c.targets->a_R1()) << "\n";
  }
  const SimulationSettings& s = c.simulation;
  os << "\n[simulation]\n"
     << "omega_mod = " << fmt(s.omega_mod) << "\n"
     << "t_end_periods = " << s.t_end_periods << "\n"
     << "samples_per_period = " << s.samples_per_period << "\n"
     << "abs_tol = " << fmt(s.abs_tol) << "\n"
     << "rel_tol = " << fmt(s.rel_tol) << "\n";
  if (s.fixed_step) os << "fixed_step = " << fmt(*s.fixed_step) << "\n";
  os << "convergence_threshold = " << fmt(s.convergence_threshold) << "\n"
     << "variables = " << s.variables << "\n"
     << "init = " << (s.init == InitialMeans::Cold ? "cold" : "series") << "\n"
     << "periodicity_tol = " << fmt(s.periodicity_tol) << "\n"
     << "keep_periods = " << s.keep_periods << "\n"
     << "stability_samples = " << s.stability_samples << "\n"
     << "n_max = " << s.n_max << "\n"
     << "l_max = " << s.l_max << "\n";
  if (s.grid) os << "grid = " << fmt(s.grid->start) << ":" << fmt(s.grid->stop) << ":" << s.grid->count << "\n";
  os << "quantity = " << to_string(s.quantity) << "\n";
  if (!c.output_prefix.empty()) os << "\n[output]\nprefix = " << c.output_prefix << "\n";
  return os.str();
}

}  // namespace optomod
