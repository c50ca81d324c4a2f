#include "mfglab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mfglab/errors.hpp"
#include "mfglab/homogeneous.hpp"
#include "mfglab/kinetic.hpp"
#include "mfglab/macro.hpp"
#include "mfglab/manifold.hpp"
#include "mfglab/nash.hpp"
#include "mfglab/particles.hpp"
#include "mfglab/rng.hpp"

namespace mfg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kArtifactName = "mfglab";
constexpr const char* kArtifactVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

/// Tolerance of the equilibrium-consistency check recorded in the
/// diagnostics (max - min of the chemical potential).
constexpr double kVerifyTol = 1e-6;

/// Automatic step sizes never exceed this, so slow-drift runs still
/// resolve the relaxation time scale.
constexpr double kMaxAutoDt = 1e-2;

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> columns) {
    bool first = true;
    for (const char* c : columns) {
      if (!first) text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (const double v : values) {
      if (!first) text_ += ',';
      text_ += format_double(v);
      first = false;
    }
    text_ += '\n';
  }

  std::string take() { return std::move(text_); }

 private:
  std::string text_;
};

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error("cannot move " + tmp.string() + " into place: " +
                ec.message());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in) throw Error("cannot read " + path.string());
  return buf.str();
}

// ---------------------------------------------------------------------
// Initial data.

GridPtr decision_grid(int n, std::size_t nodes) {
  switch (n) {
    case 1:
      return two_point_grid();
    case 2:
      return circle_grid(nodes);
    default:
      return sphere_axisymmetric_grid(nodes);
  }
}

/// Aligned profile times a seeded bounded multiplicative perturbation,
/// normalized to unit mass. init_kappa = 0 starts from uniform.
GridFunction initial_density(const GridPtr& grid, const Scenario& s) {
  GridFunction f(grid, 1.0);
  if (s.init_kappa > 0.0) f = vmf_density(grid, s.init_kappa, s.init_angle);
  if (s.init_perturbation > 0.0) {
    rng::SplitMix64 gen{rng::stream_key(s.seed, 0, 0)};
    for (double& v : f.values) {
      v *= 1.0 + s.init_perturbation * (2.0 * gen.next_unit() - 1.0);
    }
  }
  const double mass = integrate(f);
  for (double& v : f.values) v /= mass;
  return f;
}

/// Cell-centered density 1 + a sin(2 pi x), modulated by cos(2 pi y) in 2D.
std::vector<double> density_profile(std::size_t nx, std::size_t ny,
                                    double amplitude) {
  std::vector<double> rho(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const double wave_y =
        ny > 1 ? std::cos(2.0 * kPi * (static_cast<double>(iy) + 0.5) /
                          static_cast<double>(ny))
               : 1.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = (static_cast<double>(ix) + 0.5) /
                       static_cast<double>(nx);
      rho[iy * nx + ix] =
          1.0 + amplitude * std::sin(2.0 * kPi * x) * wave_y;
    }
  }
  return rho;
}

/// Cell-centered mean angle a cos(2 pi x).
std::vector<double> angle_profile(std::size_t nx, std::size_t ny,
                                  double amplitude) {
  std::vector<double> eta(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = (static_cast<double>(ix) + 0.5) /
                       static_cast<double>(nx);
      eta[iy * nx + ix] = amplitude * std::cos(2.0 * kPi * x);
    }
  }
  return eta;
}

// ---------------------------------------------------------------------
// Per-kind execution. Each dispatcher returns the diagnostics CSV, the
// final state as JSON, and the grid sizes for the manifest.

struct Outputs {
  std::string csv;
  json state;
  std::vector<std::pair<std::string, std::size_t>> grids;
};

json grid_json(const GridPtr& grid) {
  json g;
  g["nodes"] = grid->nodes;
  g["weights"] = grid->weights;
  g["spacing"] = grid->spacing;
  return g;
}

Outputs run_equilibrium(const Scenario& s) {
  const GridPtr grid = decision_grid(s.n, s.grid);
  const GridFunction f0 = initial_density(grid, s);
  const CostKind kind = Herding{s.interaction_strength};
  const EquilibriumSolution sol =
      fixed_point(kind, s.d, f0, s.damping, s.tol, s.max_iter);
  const VerifyResult ver = verify(kind, sol.density, s.d, kVerifyTol);
  const EnergyReport energy = energy_report(kind, sol.density, s.d);
  const double order =
      std::hypot(energy.order_vector[0], energy.order_vector[1]);

  Csv csv{"iterations",  "residual",    "chemical_constant", "partition",
          "order_norm",  "free_energy", "accepted",          "deviation"};
  csv.row({static_cast<double>(sol.iterations), sol.residual,
           sol.chemical_constant, sol.partition, order, energy.free_energy,
           ver.accepted ? 1.0 : 0.0, ver.deviation});

  Outputs out;
  out.csv = csv.take();
  out.state["d"] = s.d;
  out.state["n"] = s.n;
  out.state["interaction_strength"] = s.interaction_strength;
  out.state["grid"] = grid_json(grid);
  out.state["density"] = sol.density.values;
  out.state["order_vector"] = {energy.order_vector[0],
                               energy.order_vector[1]};
  out.state["chemical_constant"] = sol.chemical_constant;
  out.grids = {{"decision_nodes", grid->size()}};
  return out;
}

double auto_homogeneous_dt(const GridFunction& f0,
                           const HomogeneousRunConfig& cfg,
                           const Scenario& s) {
  double dt = 0.8 * stable_dt_bound(f0, cfg);
  if (cfg.scheme == Scheme::SemiImplicitDiffusion) {
    // The drift bound tightens as alignment builds; size the step for the
    // fully aligned worst case instead of the initial field.
    const double worst = 0.25 * f0.grid->spacing /
                         std::max(s.interaction_strength, 1e-12);
    dt = std::min(dt, 0.8 * worst);
  }
  if (!std::isfinite(dt)) dt = kMaxAutoDt;
  dt = std::min(dt, kMaxAutoDt);
  if (s.t_end > 0.0) dt = std::min(dt, s.t_end);
  return dt;
}

Outputs run_homogeneous(const Scenario& s) {
  const GridPtr grid = decision_grid(s.n, s.grid);
  const GridFunction f0 = initial_density(grid, s);

  HomogeneousRunConfig cfg;
  cfg.kind = Herding{s.interaction_strength};
  cfg.d = s.d;
  cfg.t_end = s.t_end;
  cfg.record_every = s.record_every;
  cfg.scheme = s.scheme == "explicit" ? Scheme::ExplicitFluxLimited
                                      : Scheme::SemiImplicitDiffusion;
  cfg.dt = s.dt > 0.0 ? s.dt : auto_homogeneous_dt(f0, cfg, s);

  const TrajectoryRecord rec = run(f0, cfg);

  Csv csv{"time", "mass", "free_energy", "dissipation", "order_norm"};
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    csv.row({rec.times[i], rec.mass[i], rec.free_energy[i],
             rec.dissipation[i], rec.order_norm[i]});
  }

  Outputs out;
  out.csv = csv.take();
  out.state["d"] = s.d;
  out.state["n"] = s.n;
  out.state["interaction_strength"] = s.interaction_strength;
  out.state["scheme"] = s.scheme;
  out.state["dt"] = cfg.dt;
  out.state["time"] = rec.times.back();
  out.state["grid"] = grid_json(grid);
  out.state["density"] = rec.final_density.values;
  out.grids = {{"decision_nodes", grid->size()}};
  return out;
}

Outputs run_particles(const Scenario& s) {
  ParticleRunConfig cfg;
  cfg.n_agents = s.n_agents;
  cfg.d = s.d;
  cfg.t_end = s.t_end;
  cfg.interaction_strength = s.interaction_strength;
  cfg.seed = s.seed;
  if (s.dt > 0.0) {
    cfg.dt = s.dt;
  } else {
    cfg.dt = std::min(kMaxAutoDt,
                      0.4 / std::max(s.interaction_strength, 1e-12));
    if (s.t_end > 0.0) cfg.dt = std::min(cfg.dt, s.t_end);
  }

  const ParticleEnsemble e0 = make_ensemble(s.n_agents, s.seed);
  const ParticleTrace trace = run(e0, cfg, s.record_every);

  Csv csv{"time", "order_norm", "energy"};
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    csv.row({trace.times[i], trace.order_norm[i], trace.energy[i]});
  }

  Outputs out;
  out.csv = csv.take();
  out.state["d"] = s.d;
  out.state["interaction_strength"] = s.interaction_strength;
  out.state["dt"] = cfg.dt;
  out.state["time"] = trace.final_state.time;
  out.state["step_count"] = trace.final_state.step_count;
  out.state["position_x"] = trace.final_state.position_x;
  out.state["position_y"] = trace.final_state.position_y;
  out.state["decision_x"] = trace.final_state.decision_x;
  out.state["decision_y"] = trace.final_state.decision_y;
  out.grids = {{"agents", s.n_agents}};
  return out;
}

Outputs run_kinetic(const Scenario& s) {
  KineticField f = make_lte_field(
      s.x_cells, s.y_cells, s.y_nodes,
      density_profile(s.x_cells, s.y_cells, s.rho_amplitude),
      angle_profile(s.x_cells, s.y_cells, s.eta_amplitude), s.d);

  double dt = s.dt > 0.0 ? s.dt : 0.8 * stable_kinetic_dt(f);
  if (s.dt == 0.0 && s.t_end > 0.0) dt = std::min(dt, s.t_end);
  const std::size_t n_steps =
      s.t_end > 0.0
          ? static_cast<std::size_t>(std::ceil(s.t_end / dt - 1e-12))
          : 0;

  Csv csv{"time", "mass", "rho_min", "rho_max", "max_lte_residual"};
  const auto record = [&](const KineticField& g) {
    const MomentFields m = moments(g, s.d);
    const auto [rmin, rmax] =
        std::minmax_element(m.rho.begin(), m.rho.end());
    const double residual =
        *std::max_element(m.lte_residual.begin(), m.lte_residual.end());
    csv.row({g.time, kinetic_mass(g), *rmin, *rmax, residual});
  };

  record(f);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    // Last step shortened to land on t_end.
    const double step_dt =
        k == n_steps ? s.t_end - static_cast<double>(n_steps - 1) * dt : dt;
    f = split_step(f, s.epsilon, s.d, step_dt);
    if (k % s.record_every == 0 || k == n_steps) record(f);
  }

  const MomentFields m = moments(f, s.d);
  Outputs out;
  out.csv = csv.take();
  out.state["d"] = s.d;
  out.state["epsilon"] = s.epsilon;
  out.state["x_cells"] = s.x_cells;
  out.state["y_cells"] = s.y_cells;
  out.state["y_nodes"] = s.y_nodes;
  out.state["time"] = f.time;
  out.state["values"] = f.values;
  out.state["moments"]["rho"] = m.rho;
  out.state["moments"]["u_x"] = m.u_x;
  out.state["moments"]["u_y"] = m.u_y;
  out.state["moments"]["lte_residual"] = m.lte_residual;
  out.grids = {{"x_cells", s.x_cells},
               {"y_cells", s.y_cells},
               {"decision_nodes", s.y_nodes}};
  return out;
}

Outputs run_macro(const Scenario& s) {
  const CoefficientTable table =
      build_coefficients(s.d, s.n, s.b_expr, s.theta_expr,
                         {s.rho_min, s.rho_max}, s.samples);

  MacroFields state = make_macro_fields(s.x_cells, s.y_cells);
  state.rho = density_profile(s.x_cells, s.y_cells, s.rho_amplitude);
  const std::vector<double> eta =
      angle_profile(s.x_cells, s.y_cells, s.eta_amplitude);
  for (std::size_t c = 0; c < state.cells(); ++c) {
    state.omega_x[c] = std::cos(eta[c]);
    state.omega_y[c] = std::sin(eta[c]);
  }

  const MacroTrajectory traj = run(state, table, s.t_end, s.record_every);

  const double cell_volume = state.dx() * state.dy();
  Csv csv{"time", "mass", "rho_min", "rho_max", "limiter_events"};
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const MacroFields& st = traj.states[i];
    double mass = 0.0;
    for (const double r : st.rho) mass += r;
    mass *= cell_volume;
    const auto [rmin, rmax] =
        std::minmax_element(st.rho.begin(), st.rho.end());
    csv.row({traj.times[i], mass, *rmin, *rmax,
             static_cast<double>(st.limiter_events)});
  }

  const MacroFields& last = traj.states.back();
  Outputs out;
  out.csv = csv.take();
  out.state["d"] = s.d;
  out.state["n"] = s.n;
  out.state["rho_star"] = table.rho_star;
  out.state["x_cells"] = s.x_cells;
  out.state["y_cells"] = s.y_cells;
  out.state["time"] = traj.times.back();
  out.state["rho"] = last.rho;
  out.state["omega_x"] = last.omega_x;
  out.state["omega_y"] = last.omega_y;
  out.state["limiter_events"] = last.limiter_events;
  out.grids = {{"x_cells", s.x_cells}, {"y_cells", s.y_cells}};
  return out;
}

Outputs run_phase_sweep(const Scenario& s) {
  Csv csv{"d", "kappa_d", "order"};
  std::vector<double> ds, kappas, orders;
  ds.reserve(s.points);
  for (std::size_t i = 0; i < s.points; ++i) {
    const double t =
        s.points == 1 ? 0.0
                      : static_cast<double>(i) /
                            static_cast<double>(s.points - 1);
    const double d = s.d_min + t * (s.d_max - s.d_min);
    const PhaseDiagnosis diag = kappa_solve(d, s.n);
    const double order = order_parameter(diag.kappa_d, s.n);
    csv.row({d, diag.kappa_d, order});
    ds.push_back(d);
    kappas.push_back(diag.kappa_d);
    orders.push_back(order);
  }

  Outputs out;
  out.csv = csv.take();
  out.state["n"] = s.n;
  out.state["critical_noise"] = 1.0 / static_cast<double>(s.n);
  out.state["d"] = ds;
  out.state["kappa_d"] = kappas;
  out.state["order"] = orders;
  out.grids = {{"points", s.points}};
  return out;
}

Outputs run_closure_compare(const Scenario& s) {
  const CoefficientTable table =
      build_coefficients(s.d, s.n, s.b_expr, s.theta_expr,
                         {s.rho_min, s.rho_max}, s.samples);

  Csv csv{"epsilon", "time", "rho_discrepancy", "max_lte_residual",
          "rho_drift"};
  json runs = json::array();
  for (const double eps : s.epsilons) {
    const KineticField f0 = make_lte_field(
        s.x_cells, 1, s.y_nodes,
        density_profile(s.x_cells, 1, s.rho_amplitude),
        angle_profile(s.x_cells, 1, s.eta_amplitude), s.d);
    const ClosureReport rep =
        closure_compare(f0, eps, s.d, s.t_end, table);
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
      csv.row({eps, rep.times[i], rep.rho_discrepancy[i],
               rep.max_lte_residual[i], rep.rho_drift[i]});
    }
    json entry;
    entry["epsilon"] = eps;
    entry["times"] = rep.times;
    entry["rho_discrepancy"] = rep.rho_discrepancy;
    entry["max_lte_residual"] = rep.max_lte_residual;
    entry["rho_drift"] = rep.rho_drift;
    runs.push_back(std::move(entry));
  }

  Outputs out;
  out.csv = csv.take();
  out.state["d"] = s.d;
  out.state["epsilons"] = s.epsilons;
  out.state["rho_star"] = table.rho_star;
  out.state["runs"] = std::move(runs);
  out.grids = {{"x_cells", s.x_cells}, {"decision_nodes", s.y_nodes}};
  return out;
}

Outputs dispatch(const Scenario& s) {
  switch (s.kind) {
    case ScenarioKind::Equilibrium:
      return run_equilibrium(s);
    case ScenarioKind::Homogeneous:
      return run_homogeneous(s);
    case ScenarioKind::Particles:
      return run_particles(s);
    case ScenarioKind::Kinetic:
      return run_kinetic(s);
    case ScenarioKind::Macro:
      return run_macro(s);
    case ScenarioKind::PhaseSweep:
      return run_phase_sweep(s);
    case ScenarioKind::ClosureCompare:
      return run_closure_compare(s);
  }
  throw StructuralError("unhandled scenario kind");
}

// ---------------------------------------------------------------------
// Manifest.

json scenario_params_json(const Scenario& s) {
  json p;
  p["d"] = s.d;
  p["n"] = s.n;
  p["grid"] = s.grid;
  p["x_cells"] = s.x_cells;
  p["y_cells"] = s.y_cells;
  p["y_nodes"] = s.y_nodes;
  p["n_agents"] = s.n_agents;
  p["dt"] = s.dt;
  p["t_end"] = s.t_end;
  p["record_every"] = s.record_every;
  p["scheme"] = s.scheme;
  p["interaction_strength"] = s.interaction_strength;
  p["damping"] = s.damping;
  p["tol"] = s.tol;
  p["max_iter"] = s.max_iter;
  p["init_kappa"] = s.init_kappa;
  p["init_angle"] = s.init_angle;
  p["init_perturbation"] = s.init_perturbation;
  p["epsilon"] = s.epsilon;
  p["epsilons"] = s.epsilons;
  p["rho_amplitude"] = s.rho_amplitude;
  p["eta_amplitude"] = s.eta_amplitude;
  p["b"] = s.b_expr;
  p["theta"] = s.theta_expr;
  p["rho_min"] = s.rho_min;
  p["rho_max"] = s.rho_max;
  p["samples"] = s.samples;
  p["d_min"] = s.d_min;
  p["d_max"] = s.d_max;
  p["points"] = s.points;
  return p;
}

json manifest_json(const RunManifest& m, const Scenario& s) {
  json j;
  j["artifact"] = {{"name", kArtifactName}, {"version", m.artifact_version}};
  j["scenario"] = {{"name", m.scenario_name},
                   {"kind", m.kind},
                   {"output_dir", m.directory},
                   {"params", scenario_params_json(s)}};
  j["rng"] = {{"algorithm", m.rng_algorithm}, {"seed", m.seed}};
  json grids = json::object();
  for (const auto& [name, size] : m.grids) grids[name] = size;
  j["grids"] = grids;
  j["wall_seconds"] = m.wall_seconds;
  j["complete"] = m.complete;
  j["error"] = m.error;
  json files = json::array();
  for (const FileRecord& f : m.files) {
    files.push_back(
        {{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
  }
  j["files"] = files;
  return j;
}

std::string run_dir_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%03zu", index);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

RunManifest run_scenario(const Scenario& s) {
  validate_scenario(s);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  std::error_code ec;
  fs::create_directories(s.output_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory \"" + s.output_dir +
                      "\": " + ec.message());
  }

  RunManifest man;
  man.scenario_name = s.name;
  man.kind = kind_name(s.kind);
  man.directory = s.output_dir;
  man.artifact_version = kArtifactVersion;
  man.rng_algorithm = rng::kAlgorithm;
  man.seed = s.seed;

  const std::string context =
      "scenario \"" + s.name + "\" (" + std::string(kind_name(s.kind)) +
      "): ";
  const auto record_failure = [&](const char* what) {
    man.complete = false;
    man.error = context + what;
    man.wall_seconds = elapsed();
    write_file_atomic(fs::path(s.output_dir) / "manifest.json",
                      manifest_json(man, s).dump(2) + "\n");
  };

  Outputs out;
  try {
    out = dispatch(s);
  } catch (const ConfigError& e) {
    record_failure(e.what());
    throw ConfigError(man.error);
  } catch (const NumericalError& e) {
    record_failure(e.what());
    throw NumericalError(man.error, e.residual());
  } catch (const std::exception& e) {
    // Other module errors keep their concrete type; the manifest carries
    // the scenario context.
    record_failure(e.what());
    throw;
  }

  man.grids = std::move(out.grids);
  const std::string state_text = out.state.dump(2) + "\n";
  man.files.push_back(
      {"diagnostics.csv", out.csv.size(), fnv1a64_hex(out.csv)});
  man.files.push_back(
      {"final_state.json", state_text.size(), fnv1a64_hex(state_text)});
  man.complete = true;
  man.wall_seconds = elapsed();

  const fs::path dir(s.output_dir);
  write_file_atomic(dir / "diagnostics.csv", out.csv);
  write_file_atomic(dir / "final_state.json", state_text);
  write_file_atomic(dir / "manifest.json",
                    manifest_json(man, s).dump(2) + "\n");
  return man;
}

SweepResult sweep(const Scenario& base, const std::string& axis,
                  const std::vector<double>& values) {
  if (!is_numeric_parameter(base.kind, axis)) {
    throw ConfigError("sweep axis \"" + axis +
                      "\" is not a numeric parameter of kind " +
                      std::string(kind_name(base.kind)));
  }
  validate_scenario(base);

  std::error_code ec;
  fs::create_directories(base.output_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory \"" +
                      base.output_dir + "\": " + ec.message());
  }

  SweepResult result;
  result.runs.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    result.runs[i].value = values[i];
    result.runs[i].directory = (fs::path(base.output_dir) /
                                run_dir_name(i))
                                   .string();
  }

  std::atomic<std::size_t> cursor{0};
  const auto worker = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < values.size();) {
      SweepRun& r = result.runs[i];
      try {
        Scenario run_s = base;
        run_s.has_sweep = false;
        run_s.output_dir = r.directory;
        set_parameter(run_s, axis, r.value);
        r.manifest = run_scenario(run_s);
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  };

  const std::size_t hw = std::max<std::size_t>(
      1, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      values.empty() ? 1 : std::min(hw, values.size());
  std::vector<std::thread> pool;
  pool.reserve(n_workers - 1);
  for (std::size_t t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  // Aggregate: the axis joined to each successful run's final
  // diagnostics row, under that run's own CSV header.
  std::string header;
  std::vector<std::string> last_rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!result.runs[i].ok) continue;
    const std::string text =
        read_text(fs::path(result.runs[i].directory) / "diagnostics.csv");
    const std::size_t first_break = text.find('\n');
    if (first_break == std::string::npos) continue;
    if (header.empty()) header = text.substr(0, first_break);
    std::size_t end = text.find_last_not_of('\n');
    if (end == std::string::npos || end < first_break) continue;
    const std::size_t begin = text.find_last_of('\n', end - 1) + 1;
    last_rows[i] = text.substr(begin, end - begin + 1);
  }

  std::string aggregate = axis + ",status";
  if (!header.empty()) aggregate += "," + header;
  aggregate += '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    aggregate += format_double(values[i]);
    if (result.runs[i].ok) {
      aggregate += ",ok";
      if (!last_rows[i].empty()) aggregate += "," + last_rows[i];
    } else {
      aggregate += ",failed";
      result.partial_failure = true;
    }
    aggregate += '\n';
  }

  const fs::path aggregate_path = fs::path(base.output_dir) /
                                  "aggregate.csv";
  write_file_atomic(aggregate_path, aggregate);
  result.aggregate_path = aggregate_path.string();
  return result;
}

}  // namespace mfg
