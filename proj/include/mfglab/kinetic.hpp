#pragma once

#include <cstddef>
#include <vector>

#include "mfglab/macro.hpp"
#include "mfglab/manifold.hpp"

// Solver for the scaled kinetic equation
//   df/dt + div_x(y f) = (1/epsilon) Q(f)
// on a periodic configuration domain (1D or 2D unit torus) times the unit
// circle of decisions. Transport is first-order upwind per decision node;
// the collision operator relaxes each cell's decision slice with the
// homogeneous integrator, where the slice's own mass plays the role of the
// interaction strength. Strang splitting: half transport, full collision,
// half transport.

namespace mfg {

/// f(x, y) stored cell-major: values[cell * y_nodes + k] with
/// cell = iy * nx + ix, so each cell's decision slice is contiguous.
struct KineticField {
  std::size_t nx = 1;
  /// 1 for a one-dimensional configuration domain.
  std::size_t ny = 1;
  GridPtr y_grid;
  std::vector<double> values;
  double time = 0.0;

  std::size_t cells() const { return nx * ny; }
  std::size_t y_nodes() const { return y_grid ? y_grid->size() : 0; }
  double dx() const { return 1.0 / static_cast<double>(nx); }
  double dy() const { return 1.0 / static_cast<double>(ny); }
  /// Configuration cell volume.
  double cell_volume() const { return dx() * (ny > 1 ? dy() : 1.0); }

  double* slice(std::size_t cell) { return values.data() + cell * y_nodes(); }
  const double* slice(std::size_t cell) const {
    return values.data() + cell * y_nodes();
  }
};

/// Per-cell velocity moments and distance from the local equilibrium.
struct MomentFields {
  std::vector<double> rho;
  std::vector<double> u_x;
  std::vector<double> u_y;
  /// L1(y) distance between the cell's normalized slice and the aligned
  /// equilibrium at its local effective noise; 0 for (near-)vacuum cells.
  std::vector<double> lte_residual;
};

/// Side-by-side densities from the kinetic solver and the macroscopic
/// closure started from the same initial moments.
struct ClosureReport {
  std::vector<double> times;
  /// L1(x) distance between the two density fields at each sample time.
  std::vector<double> rho_discrepancy;
  /// Largest lte_residual over cells at each sample time.
  std::vector<double> max_lte_residual;
  /// L1(x) distance of the kinetic density from its initial value.
  std::vector<double> rho_drift;
};

/// Uniform-in-x, uniform-in-y field of total mass 1.
KineticField make_kinetic_field(std::size_t nx, std::size_t ny,
                                std::size_t y_nodes);

/// Locally equilibrated field: each cell's slice is rho[c] times the
/// aligned equilibrium at effective noise d / rho[c] pointing along the
/// angle eta[c] (the uniform density below the alignment threshold).
KineticField make_lte_field(std::size_t nx, std::size_t ny,
                            std::size_t y_nodes,
                            const std::vector<double>& rho,
                            const std::vector<double>& eta, double d);

/// Total mass, quadrature in y times cell volume in x.
double kinetic_mass(const KineticField& f);

/// Transport CFL bound 0.5 * (smallest configuration spacing); decision
/// speeds are at most 1.
double stable_kinetic_dt(const KineticField& f);

/// Number of uniform collision substeps a cell of mass rho takes to cover
/// the relaxation interval dt / epsilon while respecting the homogeneous
/// drift bound (the cost gradient never exceeds the slice mass).
std::size_t collision_substeps(double rho, double epsilon, double dt,
                               double y_spacing);

/// One Strang-split update over dt. Throws ConfigError on nonpositive
/// dt/epsilon/d or when dt exceeds the transport bound.
KineticField split_step(const KineticField& f, double epsilon, double d,
                        double dt);

/// Density, mean velocity (zero below the vacuum floor 1e-12), and local
/// equilibrium residual per cell. d sets the effective noise d / rho used
/// for the reference equilibrium.
MomentFields moments(const KineticField& f, double d);

/// Advances the kinetic field and the macroscopic closure (seeded with the
/// same initial moments) to t_end, sampling both densities at eight
/// intermediate times plus the endpoints. Each solver substeps with its
/// own stable dt. Errors from either solver propagate.
ClosureReport closure_compare(const KineticField& f0, double epsilon,
                              double d, double t_end,
                              const CoefficientTable& coeffs);

}  // namespace mfg
