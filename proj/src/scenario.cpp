#include "mfglab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "mfglab/errors.hpp"
#include "mfglab/expression.hpp"

namespace mfg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a comment starting with '#' or ';' at the line start or after
// whitespace (expression values never contain either character).
std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') &&
        (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
      return line.substr(0, i);
    }
  }
  return line;
}

struct Entry {
  std::string value;
  int line = 0;
};

struct RawConfig {
  std::map<std::string, std::map<std::string, Entry>> sections;
};

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header \"" + body + "\"");
      }
      section = trim(body.substr(1, body.size() - 2));
      if (raw.sections.count(section) != 0) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": duplicate section [" + section + "]");
      }
      raw.sections[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value, got \"" + body + "\"");
    }
    if (section.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any section");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    auto& sec = raw.sections[section];
    if (sec.count(key) != 0) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key \"" + key + "\" in [" + section +
                        "]");
    }
    sec[key] = Entry{value, line_no};
  }
  return raw;
}

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool lo_incl = false;
  bool hi_incl = false;

  bool contains(double v) const {
    if (!std::isfinite(v)) return false;
    if (v < lo || (v == lo && !lo_incl)) return false;
    if (v > hi || (v == hi && !hi_incl)) return false;
    return true;
  }
  std::string str() const {
    const auto bound = [](double b) {
      if (b == kInf) return std::string("inf");
      if (b == -kInf) return std::string("-inf");
      std::ostringstream os;
      os << b;
      return os.str();
    };
    return std::string(lo_incl ? "[" : "(") + bound(lo) + ", " + bound(hi) +
           (hi_incl ? "]" : ")");
  }
};

[[noreturn]] void out_of_range(const std::string& key, const std::string& got,
                               const Range& range) {
  throw ConfigError("parameter \"" + key + "\" = " + got +
                    " is out of range " + range.str());
}

double parse_number(const std::string& key, const Entry& e) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw ConfigError("config line " + std::to_string(e.line) +
                      ": parameter \"" + key + "\" = \"" + e.value +
                      "\" is not a number");
  }
  return v;
}

// Tracks which keys a scenario kind consumed so leftovers can be rejected
// with a complete listing.
class ParamReader {
 public:
  explicit ParamReader(const std::map<std::string, Entry>& entries)
      : entries_(entries) {}

  double number(const std::string& key, double def, Range range) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    used_.insert(key);
    const double v = parse_number(key, it->second);
    if (!range.contains(v)) out_of_range(key, it->second.value, range);
    return v;
  }

  std::size_t count(const std::string& key, std::size_t def, Range range) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    used_.insert(key);
    const double v = parse_number(key, it->second);
    if (v != std::floor(v)) {
      throw ConfigError("parameter \"" + key + "\" = " + it->second.value +
                        " must be an integer");
    }
    if (!range.contains(v)) out_of_range(key, it->second.value, range);
    return static_cast<std::size_t>(v);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t def) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    used_.insert(key);
    const std::string& text = it->second.value;
    char* end = nullptr;
    if (!text.empty() && text.front() == '-') {
      out_of_range(key, text, Range{0.0, kInf, true, false});
    }
    const std::uint64_t v = std::strtoull(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0') {
      throw ConfigError("parameter \"" + key + "\" = \"" + text +
                        "\" is not an unsigned integer");
    }
    return v;
  }

  std::string text(const std::string& key, const std::string& def) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    used_.insert(key);
    return it->second.value;
  }

  std::string required_text(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError("required parameter \"" + key + "\" is missing");
    }
    used_.insert(key);
    return it->second.value;
  }

  std::vector<double> list(const std::string& key,
                           std::vector<double> def, Range range) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    used_.insert(key);
    std::vector<double> out;
    std::istringstream in(it->second.value);
    std::string piece;
    while (std::getline(in, piece, ',')) {
      piece = trim(piece);
      if (piece.empty()) {
        throw ConfigError("parameter \"" + key +
                          "\" holds an empty list element");
      }
      const double v = parse_number(key, Entry{piece, it->second.line});
      if (!range.contains(v)) out_of_range(key, piece, range);
      out.push_back(v);
    }
    return out;
  }

  void finish(const std::string& section) const {
    std::string unknown;
    for (const auto& [key, entry] : entries_) {
      if (used_.count(key) != 0) continue;
      if (!unknown.empty()) unknown += ", ";
      unknown += "\"" + key + "\" (line " + std::to_string(entry.line) + ")";
    }
    if (!unknown.empty()) {
      throw ConfigError("unknown keys in [" + section + "]: " + unknown);
    }
  }

 private:
  const std::map<std::string, Entry>& entries_;
  std::set<std::string> used_;
};

std::string normalized_kind(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  return name;
}

// Every kind accepts `seed`; the rest of the keys are per-kind.
void read_params(Scenario& s, ParamReader& p) {
  const Range positive{0.0, kInf, false, false};
  const Range nonneg{0.0, kInf, true, false};
  const Range anyfinite{-kInf, kInf, false, false};
  const Range unit_amp{0.0, 1.0, true, false};
  const Range cells{1.0, 1048576.0, true, true};
  const Range nodes{8.0, 1048576.0, true, true};

  s.seed = p.seed("seed", s.seed);
  switch (s.kind) {
    case ScenarioKind::Equilibrium:
      s.d = p.number("d", s.d, positive);
      s.n = static_cast<int>(p.count("n", 2, Range{1.0, 3.0, true, true}));
      s.grid = p.count("grid", s.grid, nodes);
      s.interaction_strength =
          p.number("interaction_strength", s.interaction_strength, nonneg);
      s.damping = p.number("damping", s.damping, Range{0.0, 1.0, false, true});
      s.tol = p.number("tol", s.tol, positive);
      s.max_iter = p.count("max_iter", s.max_iter, Range{1.0, 1e9, true, true});
      s.init_kappa = p.number("init_kappa", s.init_kappa, nonneg);
      s.init_angle = p.number("init_angle", s.init_angle, anyfinite);
      s.init_perturbation =
          p.number("init_perturbation", s.init_perturbation, unit_amp);
      break;
    case ScenarioKind::Homogeneous:
      s.d = p.number("d", s.d, positive);
      s.n = static_cast<int>(p.count("n", 2, Range{1.0, 3.0, true, true}));
      s.grid = p.count("grid", s.grid, nodes);
      s.dt = p.number("dt", s.dt, nonneg);
      s.t_end = p.number("t_end", s.t_end, nonneg);
      s.record_every =
          p.count("record_every", s.record_every, Range{1.0, 1e9, true, true});
      s.scheme = p.text("scheme", s.scheme);
      s.interaction_strength =
          p.number("interaction_strength", s.interaction_strength, nonneg);
      s.init_kappa = p.number("init_kappa", s.init_kappa, nonneg);
      s.init_angle = p.number("init_angle", s.init_angle, anyfinite);
      s.init_perturbation =
          p.number("init_perturbation", s.init_perturbation, unit_amp);
      break;
    case ScenarioKind::Particles:
      s.d = p.number("d", s.d, positive);
      s.n_agents =
          p.count("n_agents", s.n_agents, Range{1.0, 1e9, true, true});
      s.dt = p.number("dt", s.dt, nonneg);
      s.t_end = p.number("t_end", s.t_end, nonneg);
      s.record_every =
          p.count("record_every", s.record_every, Range{1.0, 1e9, true, true});
      s.interaction_strength =
          p.number("interaction_strength", s.interaction_strength, nonneg);
      break;
    case ScenarioKind::Kinetic:
      s.d = p.number("d", s.d, positive);
      s.epsilon = p.number("epsilon", s.epsilon, positive);
      s.x_cells = p.count("x_cells", s.x_cells, cells);
      s.y_cells = p.count("y_cells", s.y_cells, cells);
      s.y_nodes = p.count("y_nodes", s.y_nodes, nodes);
      s.dt = p.number("dt", s.dt, nonneg);
      s.t_end = p.number("t_end", s.t_end, nonneg);
      s.record_every =
          p.count("record_every", s.record_every, Range{1.0, 1e9, true, true});
      s.rho_amplitude = p.number("rho_amplitude", s.rho_amplitude, unit_amp);
      s.eta_amplitude = p.number("eta_amplitude", s.eta_amplitude, anyfinite);
      break;
    case ScenarioKind::Macro:
      s.d = p.number("d", s.d, positive);
      s.n = static_cast<int>(p.count("n", 2, Range{1.0, 3.0, true, true}));
      s.x_cells = p.count("x_cells", s.x_cells, cells);
      s.y_cells = p.count("y_cells", s.y_cells, cells);
      s.t_end = p.number("t_end", s.t_end, nonneg);
      s.record_every =
          p.count("record_every", s.record_every, Range{1.0, 1e9, true, true});
      s.b_expr = p.required_text("b");
      s.theta_expr = p.required_text("theta");
      s.rho_min = p.number("rho_min", s.rho_min, nonneg);
      s.rho_max = p.number("rho_max", s.rho_max, positive);
      s.samples = p.count("samples", s.samples, Range{8.0, 1e7, true, true});
      s.rho_amplitude = p.number("rho_amplitude", s.rho_amplitude, unit_amp);
      s.eta_amplitude = p.number("eta_amplitude", s.eta_amplitude, anyfinite);
      break;
    case ScenarioKind::PhaseSweep:
      s.n = static_cast<int>(p.count("n", 2, Range{1.0, 3.0, true, true}));
      s.d_min = p.number("d_min", s.d_min, positive);
      s.d_max = p.number("d_max", s.d_max, positive);
      s.points = p.count("points", s.points, Range{1.0, 1e6, true, true});
      break;
    case ScenarioKind::ClosureCompare:
      s.d = p.number("d", s.d, positive);
      s.epsilons = p.list("epsilons", s.epsilons, positive);
      s.x_cells = p.count("x_cells", s.x_cells, cells);
      s.y_nodes = p.count("y_nodes", s.y_nodes, nodes);
      s.t_end = p.number("t_end", s.t_end, nonneg);
      s.b_expr = p.required_text("b");
      s.theta_expr = p.required_text("theta");
      s.rho_min = p.number("rho_min", s.rho_min, nonneg);
      s.rho_max = p.number("rho_max", s.rho_max, positive);
      s.samples = p.count("samples", s.samples, Range{8.0, 1e7, true, true});
      s.rho_amplitude = p.number("rho_amplitude", s.rho_amplitude, unit_amp);
      s.eta_amplitude = p.number("eta_amplitude", s.eta_amplitude, anyfinite);
      break;
  }
}

// Numeric keys a sweep may drive, mirroring read_params above.
const std::set<std::string>& numeric_axes(ScenarioKind kind) {
  static const std::map<ScenarioKind, std::set<std::string>> table{
      {ScenarioKind::Equilibrium,
       {"d", "n", "grid", "interaction_strength", "damping", "tol",
        "max_iter", "init_kappa", "init_angle", "init_perturbation", "seed"}},
      {ScenarioKind::Homogeneous,
       {"d", "n", "grid", "dt", "t_end", "record_every",
        "interaction_strength", "init_kappa", "init_angle",
        "init_perturbation", "seed"}},
      {ScenarioKind::Particles,
       {"d", "n_agents", "dt", "t_end", "record_every",
        "interaction_strength", "seed"}},
      {ScenarioKind::Kinetic,
       {"d", "epsilon", "x_cells", "y_cells", "y_nodes", "dt", "t_end",
        "record_every", "rho_amplitude", "eta_amplitude", "seed"}},
      {ScenarioKind::Macro,
       {"d", "n", "x_cells", "y_cells", "t_end", "record_every", "rho_min",
        "rho_max", "samples", "rho_amplitude", "eta_amplitude", "seed"}},
      {ScenarioKind::PhaseSweep, {"n", "d_min", "d_max", "points", "seed"}},
      {ScenarioKind::ClosureCompare,
       {"d", "x_cells", "y_nodes", "t_end", "rho_min", "rho_max", "samples",
        "rho_amplitude", "eta_amplitude", "seed"}},
  };
  return table.at(kind);
}

void assign_count(std::size_t& field, const std::string& key, double value) {
  if (value != std::floor(value) || value < 0.0) {
    throw ConfigError("parameter \"" + key + "\" = " + std::to_string(value) +
                      " must be a nonnegative integer");
  }
  field = static_cast<std::size_t>(value);
}

}  // namespace

const char* kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Equilibrium: return "equilibrium";
    case ScenarioKind::Homogeneous: return "homogeneous";
    case ScenarioKind::Particles: return "particles";
    case ScenarioKind::Kinetic: return "kinetic";
    case ScenarioKind::Macro: return "macro";
    case ScenarioKind::PhaseSweep: return "phase_sweep";
    case ScenarioKind::ClosureCompare: return "closure_compare";
  }
  return "unknown";
}

ScenarioKind kind_from_name(const std::string& name) {
  const std::string k = normalized_kind(name);
  for (const auto kind :
       {ScenarioKind::Equilibrium, ScenarioKind::Homogeneous,
        ScenarioKind::Particles, ScenarioKind::Kinetic, ScenarioKind::Macro,
        ScenarioKind::PhaseSweep, ScenarioKind::ClosureCompare}) {
    if (k == kind_name(kind)) return kind;
  }
  throw ConfigError(
      "unknown scenario kind \"" + name +
      "\"; expected one of equilibrium, homogeneous, particles, kinetic, "
      "macro, phase_sweep, closure_compare");
}

Scenario parse_config(const std::string& text,
                      const std::string& expected_kind) {
  const RawConfig raw = tokenize(text);
  for (const auto& [section, entries] : raw.sections) {
    if (section != "scenario" && section != "params" && section != "sweep") {
      throw ConfigError("unknown section [" + section +
                        "]; expected [scenario], [params], or [sweep]");
    }
  }

  Scenario s;
  static const std::map<std::string, Entry> kEmpty;
  const auto& scenario_sec = raw.sections.count("scenario")
                                 ? raw.sections.at("scenario")
                                 : kEmpty;
  ParamReader head(scenario_sec);
  s.name = head.text("name", s.name);
  const std::string kind_text = head.text("kind", "");
  s.output_dir = head.text("output_dir", s.output_dir);
  head.finish("scenario");

  if (s.name.empty() ||
      s.name.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                               "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
                               "0123456789_-.") != std::string::npos) {
    throw ConfigError("scenario name \"" + s.name +
                      "\" must use letters, digits, '_', '-', '.'");
  }

  if (!kind_text.empty()) {
    s.kind = kind_from_name(kind_text);
    if (!expected_kind.empty() &&
        s.kind != kind_from_name(expected_kind)) {
      throw ConfigError("config declares kind \"" + kind_text +
                        "\" but the command expects \"" + expected_kind +
                        "\"");
    }
  } else if (!expected_kind.empty()) {
    s.kind = kind_from_name(expected_kind);
  } else {
    throw ConfigError("missing \"kind\" in [scenario]");
  }

  const auto& params_sec =
      raw.sections.count("params") ? raw.sections.at("params") : kEmpty;
  ParamReader params(params_sec);
  read_params(s, params);
  params.finish("params");

  if (raw.sections.count("sweep") != 0) {
    ParamReader sweep(raw.sections.at("sweep"));
    s.sweep_axis = sweep.required_text("axis");
    s.sweep_values =
        sweep.list("values", {}, Range{-kInf, kInf, false, false});
    sweep.finish("sweep");
    s.has_sweep = true;
    if (numeric_axes(s.kind).count(s.sweep_axis) == 0) {
      throw ConfigError("sweep axis \"" + s.sweep_axis +
                        "\" is not a numeric parameter of kind " +
                        kind_name(s.kind));
    }
  }

  validate_scenario(s);
  return s;
}

Scenario parse_config_file(const std::string& path,
                           const std::string& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read config file \"" + path + "\"");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), expected_kind);
}

void set_parameter(Scenario& s, const std::string& key, double value) {
  if (numeric_axes(s.kind).count(key) == 0) {
    throw ConfigError("parameter \"" + key +
                      "\" is not a numeric parameter of kind " +
                      std::string(kind_name(s.kind)));
  }
  if (key == "d") s.d = value;
  else if (key == "dt") s.dt = value;
  else if (key == "t_end") s.t_end = value;
  else if (key == "epsilon") s.epsilon = value;
  else if (key == "interaction_strength") s.interaction_strength = value;
  else if (key == "damping") s.damping = value;
  else if (key == "tol") s.tol = value;
  else if (key == "init_kappa") s.init_kappa = value;
  else if (key == "init_angle") s.init_angle = value;
  else if (key == "init_perturbation") s.init_perturbation = value;
  else if (key == "rho_amplitude") s.rho_amplitude = value;
  else if (key == "eta_amplitude") s.eta_amplitude = value;
  else if (key == "rho_min") s.rho_min = value;
  else if (key == "rho_max") s.rho_max = value;
  else if (key == "d_min") s.d_min = value;
  else if (key == "d_max") s.d_max = value;
  else if (key == "n") {
    std::size_t tmp = 0;
    assign_count(tmp, key, value);
    s.n = static_cast<int>(tmp);
  }
  else if (key == "grid") assign_count(s.grid, key, value);
  else if (key == "x_cells") assign_count(s.x_cells, key, value);
  else if (key == "y_cells") assign_count(s.y_cells, key, value);
  else if (key == "y_nodes") assign_count(s.y_nodes, key, value);
  else if (key == "n_agents") assign_count(s.n_agents, key, value);
  else if (key == "record_every") assign_count(s.record_every, key, value);
  else if (key == "samples") assign_count(s.samples, key, value);
  else if (key == "max_iter") assign_count(s.max_iter, key, value);
  else if (key == "points") assign_count(s.points, key, value);
  else if (key == "seed") {
    std::size_t tmp = 0;
    assign_count(tmp, key, value);
    s.seed = tmp;
  } else {
    throw ConfigError("parameter \"" + key + "\" cannot be swept");
  }
  validate_scenario(s);
}

bool is_numeric_parameter(ScenarioKind kind, const std::string& key) {
  return numeric_axes(kind).count(key) != 0;
}

void validate_scenario(const Scenario& s) {
  const auto check = [](bool ok, const std::string& key, double value,
                        const char* range) {
    if (ok) return;
    std::ostringstream os;
    os << "parameter \"" << key << "\" = " << value << " is out of range "
       << range;
    throw ConfigError(os.str());
  };

  check(s.d > 0.0 && std::isfinite(s.d), "d", s.d, "(0, inf)");
  check(s.n >= 1 && s.n <= 3, "n", s.n, "[1, 3]");
  check(s.dt >= 0.0 && std::isfinite(s.dt), "dt", s.dt,
        "[0, inf), 0 = automatic");
  check(s.t_end >= 0.0 && std::isfinite(s.t_end), "t_end", s.t_end,
        "[0, inf)");
  check(s.damping > 0.0 && s.damping <= 1.0, "damping", s.damping, "(0, 1]");
  check(s.tol > 0.0, "tol", s.tol, "(0, inf)");
  check(s.interaction_strength >= 0.0 &&
            std::isfinite(s.interaction_strength),
        "interaction_strength", s.interaction_strength, "[0, inf)");
  check(s.init_kappa >= 0.0 && std::isfinite(s.init_kappa), "init_kappa",
        s.init_kappa, "[0, inf)");
  check(std::isfinite(s.init_angle), "init_angle", s.init_angle,
        "(-inf, inf)");
  check(s.init_perturbation >= 0.0 && s.init_perturbation < 1.0,
        "init_perturbation", s.init_perturbation, "[0, 1)");
  check(s.epsilon > 0.0 && std::isfinite(s.epsilon), "epsilon", s.epsilon,
        "(0, inf)");
  check(s.rho_amplitude >= 0.0 && s.rho_amplitude < 1.0, "rho_amplitude",
        s.rho_amplitude, "[0, 1)");
  check(std::isfinite(s.eta_amplitude), "eta_amplitude", s.eta_amplitude,
        "(-inf, inf)");
  check(s.rho_min >= 0.0 && std::isfinite(s.rho_min), "rho_min", s.rho_min,
        "[0, inf)");
  check(s.rho_max > s.rho_min && std::isfinite(s.rho_max), "rho_max",
        s.rho_max, "(rho_min, inf)");
  check(s.d_min > 0.0 && std::isfinite(s.d_min), "d_min", s.d_min,
        "(0, inf)");
  check(s.d_max >= s.d_min && std::isfinite(s.d_max), "d_max", s.d_max,
        "[d_min, inf)");
  check(s.grid >= 2, "grid", static_cast<double>(s.grid), "[2, inf)");
  check(s.y_nodes >= 8, "y_nodes", static_cast<double>(s.y_nodes),
        "[8, inf)");
  check(s.x_cells >= 1, "x_cells", static_cast<double>(s.x_cells),
        "[1, inf)");
  check(s.y_cells >= 1, "y_cells", static_cast<double>(s.y_cells),
        "[1, inf)");
  check(s.n_agents >= 1, "n_agents", static_cast<double>(s.n_agents),
        "[1, inf)");
  check(s.record_every >= 1, "record_every",
        static_cast<double>(s.record_every), "[1, inf)");
  check(s.samples >= 8, "samples", static_cast<double>(s.samples),
        "[8, inf)");
  check(s.max_iter >= 1, "max_iter", static_cast<double>(s.max_iter),
        "[1, inf)");
  check(s.points >= 1, "points", static_cast<double>(s.points), "[1, inf)");

  if (s.scheme != "semi-implicit" && s.scheme != "explicit") {
    throw ConfigError("parameter \"scheme\" = \"" + s.scheme +
                      "\" must be semi-implicit or explicit");
  }
  if (s.n == 1 && s.init_kappa > 0.0) {
    throw ConfigError(
        "parameter \"init_kappa\" needs n >= 2 (the two-point decision set "
        "has no aligned profile)");
  }
  if (s.kind == ScenarioKind::ClosureCompare && s.epsilons.empty()) {
    throw ConfigError("parameter \"epsilons\" must list at least one value");
  }
  if (s.kind == ScenarioKind::ClosureCompare) {
    check(s.t_end > 0.0, "t_end", s.t_end, "(0, inf) for closure-compare");
  }
  for (const double e : s.epsilons) {
    check(e > 0.0 && std::isfinite(e), "epsilons", e, "(0, inf)");
  }
  if (s.kind == ScenarioKind::Macro ||
      s.kind == ScenarioKind::ClosureCompare) {
    // Surface malformed expressions at validation time, not mid-run.
    ScalarExpression::parse(s.b_expr);
    ScalarExpression::parse(s.theta_expr);
    check(1.0 + s.rho_amplitude <= s.rho_max, "rho_max", s.rho_max,
          "[1 + rho_amplitude, inf)");
  }
}

}  // namespace mfg
