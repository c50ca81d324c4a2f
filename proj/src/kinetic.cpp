#include "mfglab/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfglab/errors.hpp"
#include "mfglab/homogeneous.hpp"
#include "mfglab/kernels.hpp"
#include "mfglab/nash.hpp"

namespace mfg {

namespace {

constexpr double kVacuumFloor = 1e-12;

void check_kinetic(const KineticField& f) {
  if (!f.y_grid) {
    throw StructuralError("kinetic field has no decision grid");
  }
  if (f.y_grid->kind != ManifoldKind::Circle) {
    throw UnsupportedOperation(
        "kinetic fields are defined on a circle decision grid");
  }
  if (f.nx == 0 || f.ny == 0) {
    throw StructuralError("kinetic field has an empty configuration grid");
  }
  if (f.values.size() != f.cells() * f.y_nodes()) {
    throw StructuralError(
        "kinetic field holds " + std::to_string(f.values.size()) +
        " values for " + std::to_string(f.cells() * f.y_nodes()) +
        " cell-node pairs");
  }
}

struct NodeVelocities {
  std::vector<double> xp, xm;  // positive/negative parts of cos(theta)
  std::vector<double> yp, ym;  // positive/negative parts of sin(theta)
};

NodeVelocities node_velocities(const ManifoldGrid& grid) {
  const std::size_t n = grid.size();
  NodeVelocities v;
  v.xp.resize(n);
  v.xm.resize(n);
  v.yp.resize(n);
  v.ym.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double cx = std::cos(grid.nodes[k]);
    const double cy = std::sin(grid.nodes[k]);
    v.xp[k] = std::max(cx, 0.0);
    v.xm[k] = std::min(cx, 0.0);
    v.yp[k] = std::max(cy, 0.0);
    v.ym[k] = std::min(cy, 0.0);
  }
  return v;
}

// One upwind sweep along x or y over the whole field; scratch receives the
// update and is swapped into place.
void upwind_pass(KineticField& f, const std::vector<double>& vp,
                 const std::vector<double>& vm, double lam, bool along_y,
                 std::vector<double>& scratch) {
  const auto& ops = kernels::active_ops();
  const std::size_t nyn = f.y_nodes();
  scratch.resize(f.values.size());
  for (std::size_t iy = 0; iy < f.ny; ++iy) {
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
      const std::size_t c = iy * f.nx + ix;
      std::size_t cm, cp;
      if (along_y) {
        cm = ((iy + f.ny - 1) % f.ny) * f.nx + ix;
        cp = ((iy + 1) % f.ny) * f.nx + ix;
      } else {
        cm = iy * f.nx + (ix + f.nx - 1) % f.nx;
        cp = iy * f.nx + (ix + 1) % f.nx;
      }
      ops.upwind_combine(scratch.data() + c * nyn, f.slice(cm), f.slice(c),
                         f.slice(cp), vp.data(), vm.data(), lam, nyn);
    }
  }
  f.values.swap(scratch);
}

void transport_half(KineticField& f, double half_dt, const NodeVelocities& v,
                    std::vector<double>& scratch) {
  upwind_pass(f, v.xp, v.xm, half_dt / f.dx(), false, scratch);
  if (f.ny > 1) {
    upwind_pass(f, v.yp, v.ym, half_dt / f.dy(), true, scratch);
  }
}

// Relax every cell's slice over dt / epsilon with the homogeneous scheme.
// The raw slice carries mass rho, so the unit-strength alignment cost
// evaluates to -rho y.W of the normalized conditional, which is exactly
// the local cost the collision operator prescribes.
void collide(KineticField& f, double epsilon, double d, double dt) {
  const std::size_t nyn = f.y_nodes();
  const double tau = dt / epsilon;
  HomogeneousRunConfig cfg;
  cfg.kind = Herding{1.0};
  cfg.d = d;
  cfg.scheme = Scheme::SemiImplicitDiffusion;

  GridFunction slice(f.y_grid, 0.0);
  for (std::size_t c = 0; c < f.cells(); ++c) {
    std::copy(f.slice(c), f.slice(c) + nyn, slice.values.begin());
    const double rho = integrate(slice);
    const std::size_t ns =
        collision_substeps(rho, epsilon, dt, f.y_grid->spacing);
    cfg.dt = tau / static_cast<double>(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      slice = step(slice, cfg);
    }
    std::copy(slice.values.begin(), slice.values.end(), f.slice(c));
  }
}

}  // namespace

KineticField make_kinetic_field(std::size_t nx, std::size_t ny,
                                std::size_t y_nodes) {
  if (nx == 0 || ny == 0) {
    throw ConfigError("kinetic field needs at least one cell per direction");
  }
  KineticField f;
  f.nx = nx;
  f.ny = ny;
  f.y_grid = circle_grid(y_nodes);
  f.values.assign(nx * ny * y_nodes, 1.0);
  return f;
}

KineticField make_lte_field(std::size_t nx, std::size_t ny,
                            std::size_t y_nodes,
                            const std::vector<double>& rho,
                            const std::vector<double>& eta, double d) {
  KineticField f = make_kinetic_field(nx, ny, y_nodes);
  if (rho.size() != f.cells() || eta.size() != f.cells()) {
    throw StructuralError("rho and eta must hold one value per cell");
  }
  if (!(d > 0.0)) throw ConfigError("d must be positive");
  const std::size_t nyn = f.y_nodes();
  for (std::size_t c = 0; c < f.cells(); ++c) {
    if (!(rho[c] >= 0.0)) {
      throw DomainError("negative density in equilibrium preparation", c,
                        rho[c]);
    }
    if (rho[c] <= kVacuumFloor) {
      std::fill(f.slice(c), f.slice(c) + nyn, 0.0);
      continue;
    }
    const double kappa = kappa_solve(d / rho[c], 2).kappa_d;
    const GridFunction m = vmf_density(f.y_grid, kappa, eta[c]);
    for (std::size_t k = 0; k < nyn; ++k) {
      f.slice(c)[k] = rho[c] * m.values[k];
    }
  }
  return f;
}

double kinetic_mass(const KineticField& f) {
  check_kinetic(f);
  const auto& ops = kernels::active_ops();
  const auto& w = f.y_grid->weights;
  double total = 0.0;
  for (std::size_t c = 0; c < f.cells(); ++c) {
    total += ops.dot(f.slice(c), w.data(), f.y_nodes());
  }
  return total * f.cell_volume();
}

double stable_kinetic_dt(const KineticField& f) {
  check_kinetic(f);
  const double spacing = (f.ny > 1) ? std::min(f.dx(), f.dy()) : f.dx();
  return 0.5 * spacing;
}

std::size_t collision_substeps(double rho, double epsilon, double dt,
                               double y_spacing) {
  if (!(epsilon > 0.0) || !(dt > 0.0) || !(y_spacing > 0.0)) {
    throw ConfigError(
        "collision substeps need positive dt, epsilon, and spacing");
  }
  const double tau = dt / epsilon;
  const double target = 0.25 * y_spacing / std::max(rho, kVacuumFloor);
  const double count = std::ceil(tau / target - 1e-12);
  return std::max<std::size_t>(1, static_cast<std::size_t>(count));
}

KineticField split_step(const KineticField& f, double epsilon, double d,
                        double dt) {
  check_kinetic(f);
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(d > 0.0)) throw ConfigError("d must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double bound = stable_kinetic_dt(f);
  if (dt > bound * (1.0 + 1e-12)) {
    throw ConfigError("dt = " + std::to_string(dt) +
                      " exceeds the transport bound " + std::to_string(bound));
  }

  const NodeVelocities v = node_velocities(*f.y_grid);
  std::vector<double> scratch;
  KineticField g = f;
  transport_half(g, 0.5 * dt, v, scratch);
  collide(g, epsilon, d, dt);
  transport_half(g, 0.5 * dt, v, scratch);
  g.time = f.time + dt;
  return g;
}

MomentFields moments(const KineticField& f, double d) {
  check_kinetic(f);
  if (!(d > 0.0)) throw ConfigError("d must be positive");
  const auto& ops = kernels::active_ops();
  const std::size_t nyn = f.y_nodes();
  const auto& w = f.y_grid->weights;

  std::vector<double> wx(nyn), wy(nyn);
  for (std::size_t k = 0; k < nyn; ++k) {
    wx[k] = w[k] * std::cos(f.y_grid->nodes[k]);
    wy[k] = w[k] * std::sin(f.y_grid->nodes[k]);
  }

  MomentFields m;
  m.rho.assign(f.cells(), 0.0);
  m.u_x.assign(f.cells(), 0.0);
  m.u_y.assign(f.cells(), 0.0);
  m.lte_residual.assign(f.cells(), 0.0);

  std::vector<double> nu(nyn);
  for (std::size_t c = 0; c < f.cells(); ++c) {
    const double* slice = f.slice(c);
    const double rho = ops.dot(slice, w.data(), nyn);
    m.rho[c] = rho;
    if (rho <= kVacuumFloor) continue;

    const double ux = ops.dot(slice, wx.data(), nyn) / rho;
    const double uy = ops.dot(slice, wy.data(), nyn) / rho;
    m.u_x[c] = ux;
    m.u_y[c] = uy;

    const double kappa = kappa_solve(d / rho, 2).kappa_d;
    const double angle =
        (std::hypot(ux, uy) > 1e-14) ? std::atan2(uy, ux) : 0.0;
    const GridFunction eq = vmf_density(f.y_grid, kappa, angle);
    for (std::size_t k = 0; k < nyn; ++k) nu[k] = slice[k] / rho;
    m.lte_residual[c] =
        ops.weighted_abs_diff(w.data(), nu.data(), eq.values.data(), nyn);
  }
  return m;
}

ClosureReport closure_compare(const KineticField& f0, double epsilon,
                              double d, double t_end,
                              const CoefficientTable& coeffs) {
  check_kinetic(f0);
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");

  const MomentFields m0 = moments(f0, d);
  MacroFields ms = make_macro_fields(f0.nx, f0.ny);
  ms.rho = m0.rho;
  for (std::size_t c = 0; c < ms.cells(); ++c) {
    const double norm = std::hypot(m0.u_x[c], m0.u_y[c]);
    if (norm > 1e-14) {
      ms.omega_x[c] = m0.u_x[c] / norm;
      ms.omega_y[c] = m0.u_y[c] / norm;
    }
  }

  const double vol = f0.cell_volume();
  ClosureReport rep;
  const auto sample = [&](double t, const KineticField& fk,
                          const MacroFields& mk) {
    const MomentFields mom = moments(fk, d);
    double discrepancy = 0.0;
    double drift = 0.0;
    double worst = 0.0;
    for (std::size_t c = 0; c < fk.cells(); ++c) {
      discrepancy += std::fabs(mom.rho[c] - mk.rho[c]) * vol;
      drift += std::fabs(mom.rho[c] - m0.rho[c]) * vol;
      worst = std::max(worst, mom.lte_residual[c]);
    }
    rep.times.push_back(t);
    rep.rho_discrepancy.push_back(discrepancy);
    rep.max_lte_residual.push_back(worst);
    rep.rho_drift.push_back(drift);
  };

  sample(0.0, f0, ms);
  if (t_end <= 0.0) return rep;

  constexpr std::size_t kSamples = 8;
  const double interval = t_end / static_cast<double>(kSamples);
  const double dt_cap = 0.8 * stable_kinetic_dt(f0);
  KineticField fk = f0;
  for (std::size_t j = 1; j <= kSamples; ++j) {
    const auto nsub = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(interval / dt_cap - 1e-12)));
    const double dtk = interval / static_cast<double>(nsub);
    for (std::size_t s = 0; s < nsub; ++s) {
      fk = split_step(fk, epsilon, d, dtk);
    }
    ms = run(ms, coeffs, interval, static_cast<std::size_t>(-1))
             .states.back();
    sample(static_cast<double>(j) * interval, fk, ms);
  }
  return rep;
}

}  // namespace mfg
