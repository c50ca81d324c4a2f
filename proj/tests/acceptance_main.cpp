#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mfglab/cost.hpp"
#include "mfglab/errors.hpp"
#include "mfglab/homogeneous.hpp"
#include "mfglab/kinetic.hpp"
#include "mfglab/macro.hpp"
#include "mfglab/manifold.hpp"
#include "mfglab/nash.hpp"
#include "mfglab/particles.hpp"
#include "mfglab/rng.hpp"
#include "mfglab/runner.hpp"
#include "mfglab/scenario.hpp"

// End-to-end acceptance checks, one per shipped claim. Each criterion
// prints a single [PASS]/[FAIL] line; failing sub-checks print the
// measured value. Run with no arguments for all criteria or pass
// criterion numbers to select a subset.

namespace {

using namespace mfg;

constexpr double kPi = 3.14159265358979323846;

std::string str(double v) { return format_double(v); }

struct Check {
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      std::printf("  [fail] %s\n", what.c_str());
    }
  }

  void note(const std::string& what) const {
    std::printf("  %s\n", what.c_str());
  }
};

GridFunction random_density(const GridPtr& grid, std::uint64_t key) {
  rng::SplitMix64 gen{key};
  std::vector<double> v(grid->size());
  for (double& x : v) x = 0.2 + 1.8 * gen.next_unit();
  GridFunction f(grid, std::move(v));
  const double mass = integrate(f);
  for (double& x : f.values) x /= mass;
  return f;
}

GridFunction perturbed_uniform(const GridPtr& grid, double amplitude,
                               std::uint64_t key) {
  rng::SplitMix64 gen{key};
  std::vector<double> v(grid->size());
  for (double& x : v) x = 1.0 + amplitude * (2.0 * gen.next_unit() - 1.0);
  GridFunction f(grid, std::move(v));
  const double mass = integrate(f);
  for (double& x : f.values) x /= mass;
  return f;
}

std::vector<double> wave_profile(std::size_t nx, double amplitude) {
  std::vector<double> rho(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = (static_cast<double>(i) + 0.5) /
                     static_cast<double>(nx);
    rho[i] = 1.0 + amplitude * std::sin(2.0 * kPi * x);
  }
  return rho;
}

// ---------------------------------------------------------------------
// 1. The Nash acceptance test and the Gibbs fixed-point property agree
//    on every sample: random densities fail both, converged
//    self-consistent solutions pass both.

bool criterion1() {
  Check c;
  constexpr double kTol = 1e-6;
  std::size_t samples = 0;

  const auto agree = [&](const CostKind& kind, const GridFunction& f,
                         double d, bool should_hold) {
    const VerifyResult ver = verify(kind, f, d, kTol);
    const double gap = l1_distance(f, gibbs(cost_field(kind, f), d));
    const bool fixes = gap < kTol;
    ++samples;
    c.expect(ver.accepted == fixes,
             "Nash test and Gibbs gap disagree (accepted " +
                 std::to_string(ver.accepted) + ", gap " + str(gap) + ")");
    c.expect(ver.accepted == should_hold,
             std::string("expected ") +
                 (should_hold ? "equilibrium" : "non-equilibrium") +
                 ", Gibbs gap " + str(gap));
  };

  const GridPtr circle = circle_grid(128);
  const GridPtr sphere = sphere_axisymmetric_grid(96);
  const GridPtr pair = two_point_grid();

  std::uint64_t key = 1;
  for (const GridPtr& grid : {circle, sphere, pair}) {
    for (int i = 0; i < 20; ++i) {
      agree(Herding{1.0}, random_density(grid, key++), 0.3, false);
    }
  }

  struct Fp {
    GridPtr grid;
    double d;
    GridFunction init;
  };
  const std::vector<Fp> cases = {
      {circle, 0.2, vmf_density(circle, 1.0)},
      {circle, 0.6, perturbed_uniform(circle, 0.05, key++)},
      {sphere, 0.25, vmf_density(sphere, 0.8)},
      {sphere, 0.5, perturbed_uniform(sphere, 0.05, key++)},
      {pair, 0.4, perturbed_uniform(pair, 0.1, key++)},
      {pair, 1.5, perturbed_uniform(pair, 0.1, key++)},
  };
  for (const Fp& fp : cases) {
    const EquilibriumSolution sol =
        fixed_point(Herding{1.0}, fp.d, fp.init);
    agree(Herding{1.0}, sol.density, fp.d, true);
  }

  // Density-independent costs: the Gibbs density itself is the unique
  // equilibrium.
  for (const GridPtr& grid : {circle, sphere, pair}) {
    std::vector<double> phi(grid->size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
      phi[k] = 0.4 * std::sin(grid->nodes[k]);
    }
    const CostKind kind = FixedCost{GridFunction(grid, phi)};
    const EquilibriumSolution sol = fixed_point(kind, 0.3,
        random_density(grid, key++));
    agree(kind, sol.density, 0.3, true);
  }

  c.expect(samples >= 50,
           "need at least 50 samples, got " + std::to_string(samples));
  c.note("samples: " + std::to_string(samples));
  return c.ok;
}

// ---------------------------------------------------------------------
// 2. The alignment order parameter matches independent closed forms:
//    tanh on the two-point set, a Bessel series on the circle, and the
//    slope 1/n at zero.

double bessel_i_series(int nu, double x) {
  double term = 1.0;
  for (int k = 1; k <= nu; ++k) term *= x / (2.0 * k);
  double sum = term;
  for (int m = 1; m < 300; ++m) {
    term *= (x * x / 4.0) / (static_cast<double>(m) * (m + nu));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

bool criterion2() {
  Check c;
  for (int k = 1; k <= 10; ++k) {
    const double kappa = 0.4 * k;
    const double got = order_parameter(kappa, 1);
    c.expect(std::abs(got - std::tanh(kappa)) <= 1e-12,
             "n=1 order at kappa " + str(kappa) + ": " + str(got));
  }

  for (const double kappa : {0.5, 1.0, 2.0, 5.0}) {
    const double ratio =
        bessel_i_series(1, kappa) / bessel_i_series(0, kappa);
    const double got = order_parameter(kappa, 2);
    c.expect(std::abs(got - ratio) <= 1e-10,
             "n=2 order at kappa " + str(kappa) + ": " + str(got) +
                 " vs series " + str(ratio));
  }

  for (const int n : {1, 2, 3}) {
    const double h = 1e-5;
    const double slope = order_parameter(h, n) / h;
    c.expect(std::abs(slope - 1.0 / n) <= 1e-6,
             "slope at zero for n=" + std::to_string(n) + ": " +
                 str(slope));
    for (const double kappa : {0.5, 2.0}) {
      const double fd = (order_parameter(kappa + h, n) -
                         order_parameter(kappa - h, n)) /
                        (2.0 * h);
      const double got = order_parameter_derivative(kappa, n);
      c.expect(std::abs(got - fd) <= 1e-6,
               "derivative n=" + std::to_string(n) + " kappa " +
                   str(kappa) + ": " + str(got) + " vs fd " + str(fd));
    }
  }
  return c.ok;
}

// ---------------------------------------------------------------------
// 3. The alignment transition: below the critical noise 1/n the
//    compatibility equation has a positive root that solves it to
//    machine precision and decreases with noise; at and above the
//    threshold the root is exactly zero.

bool criterion3() {
  Check c;
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 19; ++i) {
    const double d = 0.05 * i;
    const PhaseDiagnosis diag = kappa_solve(d, 2);
    c.expect(diag.critical_noise == 0.5,
             "critical noise " + str(diag.critical_noise));
    if (d >= 0.5) {
      c.expect(diag.regime == PhaseRegime::UniformOnly &&
                   diag.kappa_d == 0.0,
               "expected exact uniform regime at d " + str(d) +
                   ", kappa " + str(diag.kappa_d));
    } else {
      c.expect(diag.regime == PhaseRegime::Bistable && diag.kappa_d > 0.0,
               "expected bistable regime at d " + str(d));
      c.expect(diag.kappa_d < previous,
               "kappa_d not strictly decreasing at d " + str(d));
      const double residual =
          std::abs(order_parameter(diag.kappa_d, 2) - d * diag.kappa_d);
      c.expect(residual <= 1e-12,
               "compatibility residual " + str(residual) + " at d " +
                   str(d));
      previous = diag.kappa_d;
    }
  }

  // Other decision sets: the threshold moves to 1/n.
  const PhaseDiagnosis two = kappa_solve(0.5, 1);
  c.expect(two.regime == PhaseRegime::Bistable,
           "n=1 at d=0.5 should be bistable (threshold 1)");
  c.expect(std::abs(std::tanh(two.kappa_d) - 0.5 * two.kappa_d) <= 1e-12,
           "n=1 compatibility residual at d=0.5");
  const PhaseDiagnosis sphere = kappa_solve(0.2, 3);
  const double res3 =
      std::abs(order_parameter(sphere.kappa_d, 3) - 0.2 * sphere.kappa_d);
  c.expect(sphere.regime == PhaseRegime::Bistable && res3 <= 1e-12,
           "n=3 compatibility residual " + str(res3));
  c.expect(kappa_solve(0.34, 3).kappa_d == 0.0,
           "n=3 above threshold 1/3 should be uniform");
  return c.ok;
}

// ---------------------------------------------------------------------
// 4. Homogeneous relaxation runs in both regimes and both schemes keep
//    unit mass to 1e-10, never increase the free energy beyond 1e-8 per
//    recorded step, and close the energy balance at first order or
//    better under simultaneous grid and step refinement.

bool criterion4() {
  Check c;

  struct Setup {
    int n;
    std::size_t grid;
    Scheme scheme;
    double d;
    double init_kappa;
  };
  const std::vector<Setup> setups = {
      {2, 128, Scheme::SemiImplicitDiffusion, 0.2, 1.0},
      {2, 128, Scheme::SemiImplicitDiffusion, 0.6, 1.0},
      {2, 128, Scheme::ExplicitFluxLimited, 0.2, 1.0},
      {2, 128, Scheme::ExplicitFluxLimited, 0.6, 1.0},
      {2, 192, Scheme::SemiImplicitDiffusion, 0.45, 0.5},
      {2, 64, Scheme::ExplicitFluxLimited, 0.3, 0.8},
      {3, 96, Scheme::SemiImplicitDiffusion, 0.25, 0.8},
      {3, 96, Scheme::SemiImplicitDiffusion, 0.5, 0.8},
      {1, 2, Scheme::SemiImplicitDiffusion, 0.4, 0.0},
      {1, 2, Scheme::SemiImplicitDiffusion, 1.2, 0.0},
  };

  std::size_t runs = 0;
  for (const Setup& setup : setups) {
    const GridPtr grid = setup.n == 1 ? two_point_grid()
                         : setup.n == 2
                             ? circle_grid(setup.grid)
                             : sphere_axisymmetric_grid(setup.grid);
    GridFunction f0 = setup.init_kappa > 0.0
                          ? vmf_density(grid, setup.init_kappa, 0.3)
                          : perturbed_uniform(grid, 0.1, 77 + runs);

    HomogeneousRunConfig cfg;
    cfg.kind = Herding{1.0};
    cfg.d = setup.d;
    cfg.t_end = 2.0;
    cfg.scheme = setup.scheme;
    cfg.record_every = 1;
    const double h = grid->spacing;
    cfg.dt = setup.scheme == Scheme::SemiImplicitDiffusion
                 ? std::min(4e-3, 0.2 * h)
                 : 0.5 * 0.4 * h * h / (2.0 * setup.d);

    const TrajectoryRecord rec = run(f0, cfg);
    ++runs;
    const std::string tag = "run " + std::to_string(runs);

    double mass_err = 0.0;
    for (const double m : rec.mass) {
      mass_err = std::max(mass_err, std::abs(m - 1.0));
    }
    c.expect(mass_err <= 1e-10, tag + " mass drift " + str(mass_err));

    double worst_rise = 0.0;
    for (std::size_t i = 1; i < rec.free_energy.size(); ++i) {
      worst_rise = std::max(worst_rise,
                            rec.free_energy[i] - rec.free_energy[i - 1]);
    }
    c.expect(worst_rise <= 1e-8,
             tag + " free energy rose by " + str(worst_rise));
  }

  // Energy balance F(t) - F(0) + integral of dissipation -> 0 under
  // simultaneous refinement. The time-discretization part of the error
  // enters with the opposite sign of the spatial part, so the ladder
  // starts where the time part dominates; coarser pairs sit in the
  // cancellation zone and show no clean order.
  std::vector<double> errors;
  for (const auto& [nodes, dt] :
       std::vector<std::pair<std::size_t, double>>{
           {256, 6e-3}, {512, 3e-3}, {1024, 1.5e-3}}) {
    const GridPtr grid = circle_grid(nodes);
    HomogeneousRunConfig cfg;
    cfg.kind = Herding{1.0};
    cfg.d = 0.2;
    cfg.dt = dt;
    cfg.t_end = 1.0;
    cfg.record_every = 1;
    cfg.scheme = Scheme::SemiImplicitDiffusion;
    const TrajectoryRecord rec = run(vmf_density(grid, 0.8, 0.4), cfg);
    double dissipated = 0.0;
    for (std::size_t i = 1; i < rec.times.size(); ++i) {
      dissipated += 0.5 * (rec.dissipation[i] + rec.dissipation[i - 1]) *
                    (rec.times[i] - rec.times[i - 1]);
    }
    errors.push_back(std::abs(rec.free_energy.back() -
                              rec.free_energy.front() + dissipated));
  }
  const double rate1 = std::log2(errors[0] / errors[1]);
  const double rate2 = std::log2(errors[1] / errors[2]);
  c.expect(rate1 >= 0.8, "balance rate " + str(rate1));
  c.expect(rate2 >= 0.8, "balance rate " + str(rate2));
  c.note("balance errors: " + str(errors[0]) + ", " + str(errors[1]) +
         ", " + str(errors[2]) + " (rates " + str(rate1) + ", " +
         str(rate2) + ")");
  return c.ok;
}

// ---------------------------------------------------------------------
// 5. Long runs land on the predicted equilibria: a perturbed uniform
//    density at subcritical noise reaches the concentrated profile with
//    the compatibility parameter; a concentrated density at
//    supercritical noise flattens to uniform.

bool criterion5() {
  Check c;
  const GridPtr grid = circle_grid(256);

  {
    HomogeneousRunConfig cfg;
    cfg.kind = Herding{1.0};
    cfg.d = 0.2;
    cfg.dt = 4e-3;
    cfg.t_end = 80.0;
    cfg.record_every = 4000;
    const TrajectoryRecord rec =
        run(perturbed_uniform(grid, 0.05, 2024), cfg);
    const std::array<double, 2> w =
        mean_decision_vector(rec.final_density);
    const double theta = std::atan2(w[1], w[0]);
    const double kappa_d = kappa_solve(0.2, 2).kappa_d;
    const double gap =
        l1_distance(rec.final_density, vmf_density(grid, kappa_d, theta));
    c.expect(gap <= 1e-3, "subcritical end-state gap " + str(gap));
    c.note("subcritical gap to concentrated profile: " + str(gap));
  }

  {
    HomogeneousRunConfig cfg;
    cfg.kind = Herding{1.0};
    cfg.d = 0.6;
    cfg.dt = 4e-3;
    cfg.t_end = 120.0;
    cfg.record_every = 4000;
    const TrajectoryRecord rec = run(vmf_density(grid, 2.0, 0.7), cfg);
    const double gap =
        l1_distance(rec.final_density, GridFunction(grid, 1.0));
    c.expect(gap <= 1e-4, "supercritical end-state gap " + str(gap));
    c.note("supercritical gap to uniform: " + str(gap));
  }
  return c.ok;
}

// ---------------------------------------------------------------------
// 6. Agent ensembles reproduce the mean-field alignment level: the
//    time-averaged order parameter sits within 3/sqrt(N) of the
//    equilibrium value, and the empirical decision histogram of a large
//    equilibrated ensemble matches the concentrated profile in L1.

bool criterion6() {
  Check c;
  const double kappa_d = kappa_solve(0.2, 2).kappa_d;
  const double target = order_parameter(kappa_d, 2);

  {
    const std::size_t n = 10000;
    ParticleRunConfig cfg;
    cfg.n_agents = n;
    cfg.d = 0.2;
    cfg.dt = 1e-2;
    cfg.t_end = 200.0;
    cfg.seed = 2024;
    const ParticleTrace trace =
        run(make_vmf_ensemble(n, kappa_d, 0.0, cfg.seed), cfg, 50);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      if (trace.times[i] < 100.0) continue;
      sum += trace.order_norm[i];
      ++count;
    }
    const double averaged = sum / static_cast<double>(count);
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    c.expect(std::abs(averaged - target) <= tol,
             "time-averaged order " + str(averaged) + " vs " +
                 str(target) + " (tol " + str(tol) + ")");
    c.note("time-averaged order: " + str(averaged) + ", equilibrium " +
           str(target));

    double norm_err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      norm_err = std::max(
          norm_err,
          std::abs(std::hypot(trace.final_state.decision_x[j],
                              trace.final_state.decision_y[j]) -
                   1.0));
    }
    c.expect(norm_err <= 1e-12, "decision norm drift " + str(norm_err));
  }

  {
    const std::size_t n = 100000;
    ParticleRunConfig cfg;
    cfg.n_agents = n;
    cfg.d = 0.2;
    cfg.dt = 1e-2;
    cfg.t_end = 5.0;
    cfg.seed = 7;
    const ParticleTrace trace =
        run(make_vmf_ensemble(n, kappa_d, 0.3, cfg.seed), cfg, 100);
    const GridPtr grid = circle_grid(64);
    const GridFunction hist = empirical_density(trace.final_state, grid);
    const std::array<double, 2> w = mean_decision(trace.final_state);
    const double theta = std::atan2(w[1], w[0]);
    const double gap =
        l1_distance(hist, vmf_density(grid, kappa_d, theta));
    c.expect(gap <= 0.05, "empirical histogram gap " + str(gap));
    c.note("empirical histogram gap: " + str(gap));
  }
  return c.ok;
}

// ---------------------------------------------------------------------
// 7. The kinetic solver is consistent with its limits: spatially uniform
//    fields evolve exactly like the homogeneous solver; the
//    local-equilibrium residual and the gap to the macroscopic closure
//    shrink with the relaxation rate; at supercritical noise the density
//    drift stays within a multiple of the rate.

bool criterion7() {
  Check c;

  {
    const std::size_t nx = 8, nyn = 64;
    KineticField f = make_kinetic_field(nx, 1, nyn);
    std::vector<double> profile(nyn);
    for (std::size_t k = 0; k < nyn; ++k) {
      const double th = f.y_grid->nodes[k];
      profile[k] = 1.0 + 0.4 * std::cos(th) + 0.2 * std::sin(2.0 * th);
    }
    for (std::size_t cell = 0; cell < f.cells(); ++cell) {
      std::copy(profile.begin(), profile.end(), f.slice(cell));
    }
    GridFunction ref(f.y_grid, profile);

    const double dt = 0.05, eps = 0.1, d = 0.25;
    for (int step = 0; step < 5; ++step) {
      f = split_step(f, eps, d, dt);
      const std::size_t ns = collision_substeps(integrate(ref), eps, dt,
                                                f.y_grid->spacing);
      HomogeneousRunConfig cfg;
      cfg.kind = Herding{1.0};
      cfg.d = d;
      cfg.dt = dt / eps / static_cast<double>(ns);
      for (std::size_t i = 0; i < ns; ++i) {
        ref = mfg::step(ref, cfg);
      }
    }
    double worst = 0.0;
    for (std::size_t cell = 0; cell < f.cells(); ++cell) {
      const double* slice = f.slice(cell);
      for (std::size_t k = 0; k < nyn; ++k) {
        worst = std::max(worst, std::abs(slice[k] - ref.values[k]));
      }
    }
    c.expect(worst <= 1e-10,
             "uniform field vs homogeneous solver: " + str(worst));
    c.note("uniform-field deviation from homogeneous solver: " +
           str(worst));
  }

  const std::vector<double> epsilons = {0.1, 0.05, 0.025};
  {
    const CoefficientTable table = build_coefficients(
        0.3, 2, "0.5", "0.1/rho", {0.0, 2.0}, 512);
    const KineticField f0 =
        make_lte_field(32, 1, 64, wave_profile(32, 0.2),
                       std::vector<double>(32, 0.0), 0.3);
    std::vector<double> gaps, residuals;
    for (const double eps : epsilons) {
      const ClosureReport rep = closure_compare(f0, eps, 0.3, 0.4, table);
      gaps.push_back(rep.rho_discrepancy.back());
      residuals.push_back(rep.max_lte_residual.back());
    }
    c.expect(gaps[0] > gaps[1] && gaps[1] > gaps[2],
             "closure gap not decreasing: " + str(gaps[0]) + ", " +
                 str(gaps[1]) + ", " + str(gaps[2]));
    c.expect(residuals[0] > residuals[1] && residuals[1] > residuals[2],
             "equilibration residual not decreasing: " + str(residuals[0]) +
                 ", " + str(residuals[1]) + ", " + str(residuals[2]));
    c.note("closure gaps: " + str(gaps[0]) + ", " + str(gaps[1]) + ", " +
           str(gaps[2]));
  }

  {
    const CoefficientTable table =
        build_coefficients(0.8, 2, "0", "0", {0.0, 2.0}, 64);
    const KineticField f0 =
        make_lte_field(64, 1, 128, wave_profile(64, 0.2),
                       std::vector<double>(64, 0.0), 0.8);
    double previous = std::numeric_limits<double>::infinity();
    for (const double eps : epsilons) {
      const ClosureReport rep = closure_compare(f0, eps, 0.8, 0.2, table);
      const double drift =
          *std::max_element(rep.rho_drift.begin(), rep.rho_drift.end());
      c.expect(drift <= 3.0 * eps,
               "supercritical drift " + str(drift) + " at rate " +
                   str(eps));
      c.expect(drift < previous,
               "drift not decreasing at rate " + str(eps));
      previous = drift;
    }
    c.note("supercritical drift at rate 0.025: " + str(previous));
  }
  return c.ok;
}

// ---------------------------------------------------------------------
// 8. The macroscopic solver: constant states are exact fixed points
//    with exactly unit orientation, generic runs conserve mass, and the
//    scheme self-converges at first order or better.

bool criterion8() {
  Check c;
  const CoefficientTable table =
      build_coefficients(0.3, 2, "0.8", "0.2/rho", {0.0, 2.0}, 512);

  for (const auto& [nx, ny, t_end] :
       std::vector<std::tuple<std::size_t, std::size_t, double>>{
           {64, 1, 0.1}, {16, 16, 0.05}}) {
    MacroFields state = make_macro_fields(nx, ny);
    std::fill(state.rho.begin(), state.rho.end(), 0.9);
    for (std::size_t i = 0; i < state.cells(); ++i) {
      state.omega_x[i] = std::cos(0.3);
      state.omega_y[i] = std::sin(0.3);
    }
    const MacroTrajectory traj = run(state, table, t_end, 1000);
    const MacroFields& last = traj.states.back();
    double err = 0.0;
    for (std::size_t i = 0; i < last.cells(); ++i) {
      err = std::max(err, std::abs(last.rho[i] - 0.9));
      err = std::max(err, std::abs(last.omega_x[i] - std::cos(0.3)));
      err = std::max(err, std::abs(last.omega_y[i] - std::sin(0.3)));
    }
    c.expect(err <= 1e-12, "constant state moved by " + str(err));
  }

  {
    MacroFields state = make_macro_fields(64, 1);
    state.rho = wave_profile(64, 0.3);
    for (std::size_t i = 0; i < 64; ++i) {
      const double a =
          0.3 * std::cos(2.0 * kPi * (static_cast<double>(i) + 0.5) / 64.0);
      state.omega_x[i] = std::cos(a);
      state.omega_y[i] = std::sin(a);
    }
    const MacroTrajectory traj = run(state, table, 0.2, 10);
    const double vol = state.dx() * state.dy();
    double mass0 = 0.0;
    for (const double r : traj.states.front().rho) mass0 += r;
    mass0 *= vol;
    double mass_err = 0.0, unit_err = 0.0;
    for (const MacroFields& st : traj.states) {
      double m = 0.0;
      for (const double r : st.rho) m += r;
      mass_err = std::max(mass_err, std::abs(m * vol - mass0));
    }
    for (std::size_t i = 0; i < 64; ++i) {
      unit_err = std::max(
          unit_err, std::abs(std::hypot(traj.states.back().omega_x[i],
                                        traj.states.back().omega_y[i]) -
                             1.0));
    }
    c.expect(mass_err <= 1e-10, "mass drift " + str(mass_err));
    c.expect(unit_err <= 1e-12, "orientation norm drift " + str(unit_err));
  }

  {
    const CoefficientTable pure =
        build_coefficients(0.3, 2, "0", "0", {0.0, 2.0}, 512);
    const std::size_t ref_n = 1024;
    MacroFields ref = make_macro_fields(ref_n, 1);
    ref.rho = wave_profile(ref_n, 0.2);
    const MacroFields ref_end =
        run(ref, pure, 0.1, 100000).states.back();

    std::vector<double> errors;
    for (const std::size_t n : {64, 128, 256}) {
      MacroFields coarse = make_macro_fields(n, 1);
      coarse.rho = wave_profile(n, 0.2);
      const MacroFields end = run(coarse, pure, 0.1, 100000).states.back();
      const std::size_t factor = ref_n / n;
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double avg = 0.0;
        for (std::size_t j = 0; j < factor; ++j) {
          avg += ref_end.rho[i * factor + j];
        }
        avg /= static_cast<double>(factor);
        err += std::abs(end.rho[i] - avg);
      }
      errors.push_back(err / static_cast<double>(n));
    }
    const double rate1 = std::log2(errors[0] / errors[1]);
    const double rate2 = std::log2(errors[1] / errors[2]);
    c.expect(rate1 >= 0.8, "self-convergence rate " + str(rate1));
    c.expect(rate2 >= 0.8, "self-convergence rate " + str(rate2));
    c.note("self-convergence rates: " + str(rate1) + ", " + str(rate2));
  }
  return c.ok;
}

// ---------------------------------------------------------------------
// 9. Reproducibility through the runner: equal configs and seeds give
//    byte-identical diagnostics; a different seed does not.

bool criterion9() {
  namespace fs = std::filesystem;
  Check c;

  const auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const auto fresh = [](const std::string& name) {
    const fs::path dir = fs::path("acceptance_out") / name;
    fs::remove_all(dir);
    return dir.string();
  };

  {
    Scenario s = parse_config(
        "[scenario]\nkind = homogeneous\nname = repro\n[params]\n"
        "d = 0.2\ngrid = 64\nt_end = 0.05\nrecord_every = 5\nseed = 42\n");
    s.output_dir = fresh("h_a");
    run_scenario(s);
    const std::string a =
        read_file(fs::path(s.output_dir) / "diagnostics.csv");
    s.output_dir = fresh("h_b");
    run_scenario(s);
    const std::string b =
        read_file(fs::path(s.output_dir) / "diagnostics.csv");
    c.expect(!a.empty() && a == b, "homogeneous reruns differ");

    s.seed = 43;
    s.output_dir = fresh("h_c");
    run_scenario(s);
    const std::string other =
        read_file(fs::path(s.output_dir) / "diagnostics.csv");
    c.expect(a != other, "different seeds gave identical diagnostics");
  }

  {
    Scenario s = parse_config(
        "[scenario]\nkind = particles\nname = repro\n[params]\n"
        "n_agents = 200\nt_end = 0.5\nrecord_every = 10\nseed = 9\n");
    s.output_dir = fresh("p_a");
    run_scenario(s);
    const std::string a =
        read_file(fs::path(s.output_dir) / "diagnostics.csv");
    s.output_dir = fresh("p_b");
    run_scenario(s);
    const std::string b =
        read_file(fs::path(s.output_dir) / "diagnostics.csv");
    c.expect(!a.empty() && a == b, "particle reruns differ");
  }
  return c.ok;
}

struct Criterion {
  int id;
  const char* title;
  bool (*fn)();
};

const Criterion kCriteria[] = {
    {1, "equilibrium acceptance coincides with the Gibbs fixed point",
     criterion1},
    {2, "order parameter matches independent closed forms", criterion2},
    {3, "alignment transition sits at the critical noise", criterion3},
    {4, "homogeneous runs conserve mass and dissipate free energy",
     criterion4},
    {5, "long runs land on the predicted equilibria", criterion5},
    {6, "agent ensembles reproduce the mean-field alignment", criterion6},
    {7, "kinetic runs match the homogeneous and macroscopic limits",
     criterion7},
    {8, "macroscopic solver conserves, stays unit-length, converges",
     criterion8},
    {9, "seeded runs reproduce byte-identical diagnostics", criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 9) {
      std::fprintf(stderr, "usage: %s [criterion numbers 1..9]\n", argv[0]);
      return 2;
    }
    selected.insert(id);
  }

  int failures = 0;
  for (const Criterion& crit : kCriteria) {
    if (!selected.empty() && selected.count(crit.id) == 0) continue;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = crit.fn();
    } catch (const std::exception& e) {
      std::printf("  [fail] unexpected error: %s\n", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    std::printf("[%s] criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL",
                crit.id, crit.title, seconds);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
