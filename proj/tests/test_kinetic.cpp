#include "mfglab/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "mfglab/errors.hpp"
#include "mfglab/homogeneous.hpp"
#include "mfglab/macro.hpp"
#include "mfglab/nash.hpp"

using namespace mfg;

namespace {

constexpr double kTau = 2.0 * 3.14159265358979323846;

// A smooth positive slice profile used as initial decision data.
std::vector<double> bumpy_slice(const ManifoldGrid& g) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    v[k] = 1.0 + 0.4 * std::cos(g.nodes[k]) + 0.2 * std::sin(2.0 * g.nodes[k]);
  }
  return v;
}

KineticField uniform_in_x(std::size_t nx, std::size_t y_nodes,
                          const std::vector<double>& slice) {
  KineticField f = make_kinetic_field(nx, 1, y_nodes);
  for (std::size_t c = 0; c < f.cells(); ++c) {
    std::copy(slice.begin(), slice.end(), f.slice(c));
  }
  return f;
}

std::vector<double> sine_density(std::size_t nx, double amplitude) {
  std::vector<double> rho(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(nx);
    rho[i] = 1.0 + amplitude * std::sin(kTau * x);
  }
  return rho;
}

}  // namespace

TEST_CASE("collision substep policy covers the relaxation interval") {
  // tau = dt/eps = 0.1, per-substep target 0.25*h/rho = 0.025 -> 4 substeps.
  CHECK(collision_substeps(1.0, 0.1, 0.01, 0.1) == 4);
  // Tiny relaxation intervals still take one substep.
  CHECK(collision_substeps(1.0, 1e9, 0.01, 0.1) == 1);
  // Vacuum cells are floored, not divided by zero.
  CHECK(collision_substeps(0.0, 0.1, 0.01, 0.1) == 1);
  // Denser cells need more substeps.
  CHECK(collision_substeps(2.0, 0.1, 0.01, 0.1) >
        collision_substeps(0.5, 0.1, 0.01, 0.1));
  CHECK_THROWS_AS(collision_substeps(1.0, 0.0, 0.01, 0.1), ConfigError);
  CHECK_THROWS_AS(collision_substeps(1.0, 0.1, -1.0, 0.1), ConfigError);
}

TEST_CASE("x-uniform fields reduce to the homogeneous dynamics") {
  const std::size_t nx = 8;
  const std::size_t nyn = 64;
  const auto grid = circle_grid(nyn);
  const auto slice0 = bumpy_slice(*grid);
  KineticField f = uniform_in_x(nx, nyn, slice0);
  // Normalize so the total mass is 1 (every slice gets the same factor).
  const double total = kinetic_mass(f);
  for (double& v : f.values) v /= total;

  const double epsilon = 0.1;
  const double d = 0.25;
  const double dt = 0.05;
  const std::size_t n_steps = 5;

  // Reference: the same decision slice relaxed by the homogeneous
  // integrator with the identical substep sequence.
  GridFunction g(grid, std::vector<double>(f.slice(0), f.slice(0) + nyn));
  HomogeneousRunConfig cfg;
  cfg.kind = Herding{1.0};
  cfg.d = d;
  cfg.scheme = Scheme::SemiImplicitDiffusion;
  for (std::size_t s = 0; s < n_steps; ++s) {
    f = split_step(f, epsilon, d, dt);
    const std::size_t ns =
        collision_substeps(integrate(g), epsilon, dt, grid->spacing);
    cfg.dt = (dt / epsilon) / static_cast<double>(ns);
    for (std::size_t q = 0; q < ns; ++q) g = step(g, cfg);
  }

  double worst = 0.0;
  for (std::size_t c = 0; c < f.cells(); ++c) {
    for (std::size_t k = 0; k < nyn; ++k) {
      worst = std::max(worst, std::fabs(f.slice(c)[k] - g.values[k]));
    }
  }
  CHECK(worst == 0.0);  // transport of x-constant data is exact
  CHECK(f.time == doctest::Approx(0.25));
}

TEST_CASE("split steps conserve mass and positivity") {
  SUBCASE("1D") {
    const std::size_t nx = 32;
    std::vector<double> eta(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / nx;
      eta[i] = 0.2 * std::cos(kTau * x);
    }
    KineticField f = make_lte_field(nx, 1, 64, sine_density(nx, 0.3), eta, 0.3);
    const double m0 = kinetic_mass(f);
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-12));
    for (int s = 0; s < 10; ++s) f = split_step(f, 0.05, 0.3, 0.01);
    CHECK(std::fabs(kinetic_mass(f) - m0) <= 1e-12);
    CHECK(*std::min_element(f.values.begin(), f.values.end()) >= 0.0);
  }
  SUBCASE("2D") {
    const std::size_t n = 8;
    std::vector<double> rho(n * n), eta(n * n);
    for (std::size_t iy = 0; iy < n; ++iy) {
      for (std::size_t ix = 0; ix < n; ++ix) {
        const double x = (static_cast<double>(ix) + 0.5) / n;
        const double y = (static_cast<double>(iy) + 0.5) / n;
        rho[iy * n + ix] = 1.0 + 0.2 * std::sin(kTau * x) * std::cos(kTau * y);
        eta[iy * n + ix] = 0.3 * std::sin(kTau * y);
      }
    }
    KineticField f = make_lte_field(n, n, 32, rho, eta, 0.3);
    const double m0 = kinetic_mass(f);
    for (int s = 0; s < 3; ++s) f = split_step(f, 0.2, 0.3, 0.05);
    CHECK(std::fabs(kinetic_mass(f) - m0) <= 1e-12);
    CHECK(*std::min_element(f.values.begin(), f.values.end()) >= 0.0);
  }
}

TEST_CASE("transport is first-order accurate against exact advection") {
  // With a near-infinite scaling parameter the collision contribution over
  // the run is O(t/epsilon) and the scheme reduces to upwind advection of
  // each decision node's x-profile at speed cos(theta_k).
  const double epsilon = 1e9;
  const double t_end = 0.25;
  const std::size_t nyn = 8;

  const auto l1_error = [&](std::size_t nx) {
    KineticField f = make_kinetic_field(nx, 1, nyn);
    for (std::size_t c = 0; c < nx; ++c) {
      const double x = (static_cast<double>(c) + 0.5) / nx;
      const double v = 1.0 + 0.5 * std::sin(kTau * x);
      std::fill(f.slice(c), f.slice(c) + nyn, v);
    }
    const double dt = 0.4 / static_cast<double>(nx);
    const auto n_steps = static_cast<std::size_t>(std::lround(t_end / dt));
    for (std::size_t s = 0; s < n_steps; ++s) {
      f = split_step(f, epsilon, 0.5, dt);
    }
    const double t = static_cast<double>(n_steps) * dt;
    double err = 0.0;
    for (std::size_t c = 0; c < nx; ++c) {
      const double x = (static_cast<double>(c) + 0.5) / nx;
      for (std::size_t k = 0; k < nyn; ++k) {
        const double shift = x - std::cos(f.y_grid->nodes[k]) * t;
        const double exact = 1.0 + 0.5 * std::sin(kTau * shift);
        err += f.y_grid->weights[k] * std::fabs(f.slice(c)[k] - exact);
      }
    }
    return err / static_cast<double>(nx);
  };

  const double e32 = l1_error(32);
  const double e64 = l1_error(64);
  const double e128 = l1_error(128);
  CHECK(e32 / e64 >= 1.7);
  CHECK(e64 / e128 >= 1.7);
}

TEST_CASE("moment extraction matches closed-form references") {
  const std::size_t nyn = 128;

  SUBCASE("uniform slices carry zero velocity") {
    KineticField f = make_kinetic_field(4, 1, nyn);
    const auto m = moments(f, 0.6);
    for (std::size_t c = 0; c < f.cells(); ++c) {
      CHECK(m.rho[c] == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(std::fabs(m.u_x[c]) <= 1e-14);
      CHECK(std::fabs(m.u_y[c]) <= 1e-14);
      // Above the alignment threshold the uniform slice is the equilibrium.
      CHECK(m.lte_residual[c] <= 1e-14);
    }
  }
  SUBCASE("aligned slices report the alignment order times the direction") {
    KineticField f = make_kinetic_field(2, 1, nyn);
    const double kappa = 2.0;
    const double theta0 = 1.1;
    const double rho0 = 1.5;
    const GridFunction m = vmf_density(f.y_grid, kappa, theta0);
    for (std::size_t c = 0; c < f.cells(); ++c) {
      for (std::size_t k = 0; k < nyn; ++k) {
        f.slice(c)[k] = rho0 * m.values[k];
      }
    }
    const auto mom = moments(f, 0.3);
    const double c2 = order_parameter(kappa, 2);
    CHECK(std::fabs(mom.rho[0] - rho0) <= 1e-13);
    CHECK(std::fabs(mom.u_x[0] - c2 * std::cos(theta0)) <= 1e-10);
    CHECK(std::fabs(mom.u_y[0] - c2 * std::sin(theta0)) <= 1e-10);
  }
  SUBCASE("a decision spike reports its own direction") {
    KineticField f = make_kinetic_field(1, 1, 64);
    const std::size_t k0 = 10;
    std::fill(f.slice(0), f.slice(0) + 64, 0.0);
    f.slice(0)[k0] = 1.0 / f.y_grid->weights[k0];
    const auto m = moments(f, 0.3);
    CHECK(std::fabs(m.rho[0] - 1.0) <= 1e-14);
    CHECK(std::fabs(m.u_x[0] - std::cos(f.y_grid->nodes[k0])) <= 1e-14);
    CHECK(std::fabs(m.u_y[0] - std::sin(f.y_grid->nodes[k0])) <= 1e-14);
  }
  SUBCASE("vacuum cells are floored to zero velocity") {
    KineticField f = make_kinetic_field(2, 1, 32);
    std::fill(f.slice(1), f.slice(1) + 32, 0.0);
    const auto m = moments(f, 0.3);
    CHECK(m.rho[1] == 0.0);
    CHECK(m.u_x[1] == 0.0);
    CHECK(m.lte_residual[1] == 0.0);
  }
}

TEST_CASE("equilibrated fields report small local residuals") {
  const std::size_t nx = 16;
  std::vector<double> eta(nx, 0.4);
  KineticField f = make_lte_field(nx, 1, 64, sine_density(nx, 0.2), eta, 0.3);
  const auto m = moments(f, 0.3);
  for (std::size_t c = 0; c < nx; ++c) {
    CHECK(m.lte_residual[c] <= 1e-8);
  }

  // A uniform slice below the alignment threshold is far from equilibrium.
  KineticField g = make_kinetic_field(2, 1, 64);
  const auto mg = moments(g, 0.2);
  CHECK(mg.lte_residual[0] > 0.05);
}

TEST_CASE("closure comparison keeps uniform states pinned") {
  const auto coeffs =
      build_coefficients(0.3, 2, "0.5", "0.1/rho", {0.0, 2.0}, 512);
  const std::size_t nx = 8;
  KineticField f = make_lte_field(nx, 1, 64, std::vector<double>(nx, 1.0),
                                  std::vector<double>(nx, 0.0), 0.3);
  const auto rep = closure_compare(f, 0.1, 0.3, 0.1, coeffs);
  REQUIRE(rep.times.size() == 9);
  for (std::size_t j = 0; j < rep.times.size(); ++j) {
    CHECK(rep.rho_discrepancy[j] <= 1e-10);
    CHECK(rep.rho_drift[j] <= 1e-12);
  }
}

TEST_CASE("closure discrepancy and residual shrink with the scaling") {
  const auto coeffs =
      build_coefficients(0.3, 2, "0.5", "0.1/rho", {0.0, 2.0}, 1024);
  const std::size_t nx = 32;
  const auto rho0 = sine_density(nx, 0.2);  // supercritical everywhere
  const std::vector<double> eta(nx, 0.0);

  std::vector<double> discrepancy, residual;
  for (const double eps : {0.2, 0.1, 0.05}) {
    KineticField f = make_lte_field(nx, 1, 64, rho0, eta, 0.3);
    const auto rep = closure_compare(f, eps, 0.3, 0.1, coeffs);
    discrepancy.push_back(rep.rho_discrepancy.back());
    residual.push_back(rep.max_lte_residual.back());
  }
  CHECK(discrepancy[1] < discrepancy[0]);
  CHECK(discrepancy[2] < discrepancy[1]);
  CHECK(residual[1] < residual[0]);
  CHECK(residual[2] < residual[1]);
}

TEST_CASE("subcritical densities stay static to the scaling order") {
  // Effective noise above threshold everywhere: slices relax to uniform,
  // the mean velocity vanishes, and the density only drifts at the order
  // of the scaling parameter. The closure side is exactly static.
  const auto coeffs =
      build_coefficients(0.8, 2, "0.2", "0.1/rho", {0.0, 2.0}, 256);
  const std::size_t nx = 32;
  const double eps = 0.1;
  KineticField f = make_lte_field(nx, 1, 32, sine_density(nx, 0.2),
                                  std::vector<double>(nx, 0.0), 0.8);
  const auto rep = closure_compare(f, eps, 0.8, 0.1, coeffs);
  double max_drift = 0.0;
  for (std::size_t j = 0; j < rep.times.size(); ++j) {
    max_drift = std::max(max_drift, rep.rho_drift[j]);
    // c vanishes below threshold, so the closure never moves and the
    // discrepancy equals the kinetic drift.
    CHECK(std::fabs(rep.rho_discrepancy[j] - rep.rho_drift[j]) <= 1e-12);
  }
  CHECK(max_drift <= 3.0 * eps);
  CHECK(max_drift > 0.0);
}

TEST_CASE("kinetic stepping guards its configuration") {
  KineticField f = make_kinetic_field(16, 1, 32);
  SUBCASE("transport bound") {
    CHECK(stable_kinetic_dt(f) == doctest::Approx(0.5 / 16.0));
    CHECK_THROWS_AS(split_step(f, 0.1, 0.3, 0.1), ConfigError);
  }
  SUBCASE("nonpositive parameters") {
    CHECK_THROWS_AS(split_step(f, 0.0, 0.3, 0.01), ConfigError);
    CHECK_THROWS_AS(split_step(f, 0.1, -0.3, 0.01), ConfigError);
    CHECK_THROWS_AS(split_step(f, 0.1, 0.3, 0.0), ConfigError);
  }
  SUBCASE("structural checks") {
    f.values.pop_back();
    CHECK_THROWS_AS(split_step(f, 0.1, 0.3, 0.01), StructuralError);
    CHECK_THROWS_AS(make_kinetic_field(0, 1, 32), ConfigError);
  }
  SUBCASE("non-circle decision grids") {
    KineticField g;
    g.nx = 4;
    g.ny = 1;
    g.y_grid = sphere_axisymmetric_grid(16);
    g.values.assign(4 * 16, 1.0);
    CHECK_THROWS_AS(split_step(g, 0.1, 0.3, 0.01), UnsupportedOperation);
  }
  SUBCASE("equilibrium preparation validates its inputs") {
    CHECK_THROWS_AS(
        make_lte_field(4, 1, 32, std::vector<double>(3, 1.0),
                       std::vector<double>(4, 0.0), 0.3),
        StructuralError);
    CHECK_THROWS_AS(
        make_lte_field(4, 1, 32, std::vector<double>(4, -1.0),
                       std::vector<double>(4, 0.0), 0.3),
        DomainError);
  }
}
