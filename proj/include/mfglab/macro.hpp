#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mfglab/expression.hpp"

namespace mfg {

/// Flux coefficients of the macroscopic closure. The alignment speed
/// c(kappa_{d/rho}) is tabulated over xi = sqrt(rho - rho_star) with exact
/// nodal slopes (cubic Hermite), which resolves the square-root onset at
/// the threshold rho_star = n*d; below the threshold it is exactly zero.
/// The transport coefficients b and theta come from user-supplied
/// closed-form expressions of rho.
struct CoefficientTable {
  double d = 0.2;
  int n = 2;
  double rho_star = 0.4;
  double rho_max = 0.0;
  std::vector<double> xi, c, dcdxi;
  ScalarExpression b, theta;

  /// Alignment speed at density rho; 0 at or below the threshold.
  /// Queries above rho_max throw DomainError.
  double c_of_rho(double rho) const;
  /// dc/drho. The square-root singularity at the threshold is capped
  /// within the first table interval to keep wave-speed estimates finite.
  double c_slope(double rho) const;
  double b_of_rho(double rho) const { return b(rho); }
  double theta_of_rho(double rho) const { return theta(rho); }
};

CoefficientTable build_coefficients(double d, int n, const std::string& b_spec,
                                    const std::string& theta_spec,
                                    std::array<double, 2> rho_range,
                                    std::size_t samples);

/// Density and unit orientation on a uniform periodic grid over the unit
/// torus; ny == 1 selects the 1D specialization (orientation advanced by
/// its angle, so the unit constraint is exact).
struct MacroFields {
  std::size_t nx = 1, ny = 1;
  std::vector<double> rho;      // row-major [iy][ix]
  std::vector<double> omega_x, omega_y;
  double time = 0.0;
  /// Count of density-positivity limiter activations so far.
  std::size_t limiter_events = 0;

  std::size_t cells() const { return rho.size(); }
  double dx() const { return 1.0 / static_cast<double>(nx); }
  double dy() const { return 1.0 / static_cast<double>(ny); }
};

MacroFields make_macro_fields(std::size_t nx, std::size_t ny = 1);

/// Largest stable step: 0.5 * min spacing / max characteristic speed,
/// with speeds estimated by max(|c| + rho |dc/drho|, |b|) per cell.
double stable_macro_dt(const MacroFields& state, const CoefficientTable& t);

/// One forward-Euler step: conservative local Lax-Friedrichs update of the
/// density, upwind transport of the orientation along itself plus the
/// tangential density-gradient source, unit length restored per cell.
/// dt above the stability bound throws ConfigError. Negative densities
/// after the flux update are clipped with mass restored (limiter_events
/// increments).
MacroFields step(const MacroFields& state, const CoefficientTable& t,
                 double dt);

struct MacroTrajectory {
  std::vector<double> times;
  std::vector<MacroFields> states;
  std::size_t limiter_engaged = 0;
};

/// Iterates step with dt chosen each step from stable_macro_dt (capped to
/// land exactly on t_end), recording every record_every steps plus the
/// initial and final states.
MacroTrajectory run(const MacroFields& state, const CoefficientTable& t,
                    double t_end, std::size_t record_every = 1);

}  // namespace mfg
