#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Scenario configuration for the command-line harness: a small sectioned
// key-value format ([scenario] identity, [params] module parameters,
// [sweep] optional parameter axis), parsed strictly. Unknown keys, unknown
// sections, duplicates, and out-of-range values are all rejected before
// any solver runs.

namespace mfg {

enum class ScenarioKind {
  Equilibrium,
  Homogeneous,
  Particles,
  Kinetic,
  Macro,
  PhaseSweep,
  ClosureCompare,
};

const char* kind_name(ScenarioKind kind);
ScenarioKind kind_from_name(const std::string& name);

struct Scenario {
  std::string name = "run";
  ScenarioKind kind = ScenarioKind::Equilibrium;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  double d = 0.2;
  int n = 2;
  std::size_t grid = 256;
  std::size_t x_cells = 64;
  std::size_t y_cells = 1;
  std::size_t y_nodes = 128;
  std::size_t n_agents = 1000;
  /// 0 requests the module's own stable choice.
  double dt = 0.0;
  double t_end = 1.0;
  std::size_t record_every = 1;
  std::string scheme = "semi-implicit";
  double interaction_strength = 1.0;
  double damping = 0.5;
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  /// Initial density: aligned profile at init_kappa/init_angle, perturbed
  /// multiplicatively by seeded noise of the given relative amplitude.
  double init_kappa = 0.0;
  double init_angle = 0.0;
  double init_perturbation = 0.05;
  /// Kinetic scaling parameter; closure comparisons take a list.
  double epsilon = 0.1;
  std::vector<double> epsilons{0.1, 0.05};
  /// Initial fields 1 + a sin(2 pi x) (times cos(2 pi y) in 2D) and
  /// orientation angle eta_amplitude cos(2 pi x).
  double rho_amplitude = 0.2;
  double eta_amplitude = 0.0;
  std::string b_expr;
  std::string theta_expr;
  double rho_min = 0.0;
  double rho_max = 2.0;
  std::size_t samples = 1024;
  /// Phase sweep grid.
  double d_min = 0.1;
  double d_max = 0.9;
  std::size_t points = 17;

  /// Optional [sweep] section.
  std::string sweep_axis;
  std::vector<double> sweep_values;
  bool has_sweep = false;
};

/// Parses and validates a configuration document. When expected_kind is
/// named, the document may omit `kind`; a conflicting value is an error.
/// Throws ConfigError with the offending line, key, value, and range.
Scenario parse_config(const std::string& text,
                      const std::string& expected_kind = "");

Scenario parse_config_file(const std::string& path,
                           const std::string& expected_kind = "");

/// Assigns a numeric parameter by its config key (sweep axes) and
/// revalidates. Throws ConfigError for keys the scenario kind does not
/// accept or values out of range.
void set_parameter(Scenario& s, const std::string& key, double value);

/// True when `key` names a numeric parameter of the kind, i.e. a legal
/// sweep axis.
bool is_numeric_parameter(ScenarioKind kind, const std::string& key);

/// Range and cross-field checks on an already-typed scenario.
void validate_scenario(const Scenario& s);

}  // namespace mfg
