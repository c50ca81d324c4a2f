#pragma once

#include <cstddef>
#include <vector>

#include "mfglab/cost.hpp"
#include "mfglab/manifold.hpp"

// Time integrator for the homogeneous mean-field equation
//   df/dt = div_y(f grad_y Phi_f + d grad_y f)
// in exponential-fitting (Chang-Cooper style) finite-volume form, whose
// discrete stationary states are exactly the discrete Gibbs measures.
// Periodic on the circle, zero-flux on interval and sphere grids, symmetric
// flips on the two-point set.

namespace mfg {

enum class Scheme {
  /// Fully explicit update; dt limited by 0.4 * spacing^2 / (2d) and by the
  /// flux coefficients.
  ExplicitFluxLimited,
  /// Diffusive part implicit (tridiagonal solve), drift correction
  /// explicit; dt limited by 0.25 * spacing / max |grad Phi|.
  SemiImplicitDiffusion,
};

struct HomogeneousRunConfig {
  CostKind kind = Herding{1.0};
  double d = 0.2;
  double dt = 1e-3;
  double t_end = 1.0;
  /// Diagnostics are recorded every record_every steps (and at start/end).
  std::size_t record_every = 1;
  Scheme scheme = Scheme::SemiImplicitDiffusion;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> free_energy;
  std::vector<double> dissipation;
  /// |W_f| at the recorded times.
  std::vector<double> order_norm;
  GridFunction final_density;
};

/// Largest stable dt for the scheme at the current cost field; infinity
/// when unconstrained (implicit pure diffusion).
double stable_dt_bound(const GridFunction& f, const HomogeneousRunConfig& cfg);

/// One conservative finite-volume update. The cost field is refreshed from
/// f. Post-step values in [-1e-12, 0) are clipped to zero and the pre-clip
/// mass restored; anything below -1e-12 raises NumericalError advising a
/// smaller dt. Throws ConfigError when dt violates the scheme bound.
GridFunction step(const GridFunction& f, const HomogeneousRunConfig& cfg);

/// Iterates step() to t_end, recording diagnostics from energy_report.
TrajectoryRecord run(const GridFunction& f0, const HomogeneousRunConfig& cfg);

/// The discrete collision operator Q(f) applied once (the explicit update
/// is f + dt Q(f)). Exposed for operator-level tests and for the kinetic
/// module's dissipation checks.
GridFunction collision_operator(const GridFunction& f, const CostKind& kind,
                                double d);

}  // namespace mfg
