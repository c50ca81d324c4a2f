#include "mfglab/macro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mfglab/errors.hpp"
#include "mfglab/nash.hpp"

namespace mfg {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void check_macro(const MacroFields& s) {
  const std::size_t n = s.nx * s.ny;
  if (s.nx < 1 || s.ny < 1 || n == 0 || s.rho.size() != n ||
      s.omega_x.size() != n || s.omega_y.size() != n) {
    throw StructuralError("macro state arrays do not match the grid shape");
  }
}

// Hermite basis on the unit interval.
double hermite(double t, double h, double v0, double m0, double v1,
               double m1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * v0 + (t3 - 2.0 * t2 + t) * h * m0 +
         (-2.0 * t3 + 3.0 * t2) * v1 + (t3 - t2) * h * m1;
}

double hermite_deriv(double t, double h, double v0, double m0, double v1,
                     double m1) {
  const double t2 = t * t;
  return ((6.0 * t2 - 6.0 * t) * v0 + (3.0 * t2 - 4.0 * t + 1.0) * h * m0 +
          (-6.0 * t2 + 6.0 * t) * v1 + (3.0 * t2 - 2.0 * t) * h * m1) / h;
}

double wrap_angle(double a) { return std::remainder(a, kTwoPi); }

}  // namespace

double CoefficientTable::c_of_rho(double rho) const {
  if (rho <= rho_star) return 0.0;
  if (rho > rho_max * (1.0 + 1e-12)) {
    throw DomainError("density above the tabulated coefficient range",
                      static_cast<std::size_t>(-1), rho);
  }
  if (xi.size() < 2) return 0.0;
  const double x = std::sqrt(std::min(rho, rho_max) - rho_star);
  const double h = xi.back() / static_cast<double>(xi.size() - 1);
  const std::size_t i =
      std::min(xi.size() - 2, static_cast<std::size_t>(x / h));
  const double t = (x - xi[i]) / h;
  return hermite(t, h, c[i], dcdxi[i], c[i + 1], dcdxi[i + 1]);
}

double CoefficientTable::c_slope(double rho) const {
  if (rho <= rho_star) return 0.0;
  if (rho > rho_max * (1.0 + 1e-12)) {
    throw DomainError("density above the tabulated coefficient range",
                      static_cast<std::size_t>(-1), rho);
  }
  if (xi.size() < 2) return 0.0;
  const double h = xi.back() / static_cast<double>(xi.size() - 1);
  const double x = std::sqrt(std::min(rho, rho_max) - rho_star);
  const std::size_t i =
      std::min(xi.size() - 2, static_cast<std::size_t>(x / h));
  const double t = (x - xi[i]) / h;
  const double dcd_xi =
      hermite_deriv(t, h, c[i], dcdxi[i], c[i + 1], dcdxi[i + 1]);
  return dcd_xi / (2.0 * std::max(x, 0.5 * h));
}

CoefficientTable build_coefficients(double d, int n, const std::string& b_spec,
                                    const std::string& theta_spec,
                                    std::array<double, 2> rho_range,
                                    std::size_t samples) {
  if (!(d > 0.0)) throw ConfigError("coefficient table needs d > 0");
  if (n < 1 || n > 3) throw ConfigError("coefficient table needs n in 1..3");
  if (!(rho_range[0] >= 0.0) || !(rho_range[1] > rho_range[0])) {
    throw ConfigError("rho range must satisfy 0 <= lo < hi");
  }
  if (samples < 8) throw ConfigError("coefficient table needs >= 8 samples");

  CoefficientTable t;
  t.d = d;
  t.n = n;
  t.rho_star = static_cast<double>(n) * d;
  t.rho_max = rho_range[1];
  t.b = ScalarExpression::parse(b_spec);
  t.theta = ScalarExpression::parse(theta_spec);

  if (t.rho_max <= t.rho_star) return t;  // entire range is subcritical

  const double xi_max = std::sqrt(t.rho_max - t.rho_star);
  t.xi.resize(samples);
  t.c.resize(samples);
  t.dcdxi.resize(samples);

  // Onset slope dc/dxi at xi = 0 from the cubic coefficient a3 of the
  // order parameter: c(k) = k/n - a3 k^3 + ..., so the compatibility root
  // behaves like c ~ xi / (n sqrt(a3 n rho_star)).
  const double ks = 0.01;
  const double a3 =
      (ks / static_cast<double>(n) - order_parameter(ks, n)) / (ks * ks * ks);
  t.xi[0] = 0.0;
  t.c[0] = 0.0;
  t.dcdxi[0] =
      1.0 / std::sqrt(a3 * static_cast<double>(n * n * n) * t.rho_star);

  for (std::size_t i = 1; i < samples; ++i) {
    const double xi =
        xi_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double rho = t.rho_star + xi * xi;
    const double d_eff = d / rho;
    const double kappa = kappa_solve(d_eff, n).kappa_d;
    const double c = order_parameter(kappa, n);
    const double cp = order_parameter_derivative(kappa, n);
    // Implicit differentiation of c(kappa) = d_eff kappa.
    const double dc_ddeff = kappa * cp / (cp - d_eff);
    const double dc_drho = dc_ddeff * (-d / (rho * rho));
    t.xi[i] = xi;
    t.c[i] = c;
    t.dcdxi[i] = dc_drho * 2.0 * xi;
  }
  return t;
}

MacroFields make_macro_fields(std::size_t nx, std::size_t ny) {
  if (nx < 1 || ny < 1) throw ConfigError("grid needs at least one cell");
  MacroFields s;
  s.nx = nx;
  s.ny = ny;
  s.rho.assign(nx * ny, 1.0);
  s.omega_x.assign(nx * ny, 1.0);
  s.omega_y.assign(nx * ny, 0.0);
  return s;
}

double stable_macro_dt(const MacroFields& s, const CoefficientTable& t) {
  check_macro(s);
  double smax = 0.0;
  for (const double rho : s.rho) {
    const double c = t.c_of_rho(rho);
    const double mass_speed = std::fabs(c) + rho * std::fabs(t.c_slope(rho));
    const double orient_speed = std::fabs(t.b_of_rho(rho));
    smax = std::max(smax, std::max(mass_speed, orient_speed));
  }
  const double spacing = s.ny > 1 ? std::min(s.dx(), s.dy()) : s.dx();
  if (smax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * spacing / smax;
}

MacroFields step(const MacroFields& state, const CoefficientTable& t,
                 double dt) {
  check_macro(state);
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double bound = stable_macro_dt(state, t);
  if (dt > bound * (1.0 + 1e-12)) {
    throw ConfigError("dt = " + std::to_string(dt) +
                      " exceeds the macro stability bound " +
                      std::to_string(bound));
  }

  const std::size_t nx = state.nx, ny = state.ny;
  const double dx = state.dx(), dy = state.dy();
  MacroFields out = state;

  const auto idx = [&](std::size_t ix, std::size_t iy) {
    return iy * nx + ix;
  };
  const auto left = [&](std::size_t i) { return i == 0 ? nx - 1 : i - 1; };
  const auto right = [&](std::size_t i) { return i + 1 == nx ? 0 : i + 1; };
  const auto down = [&](std::size_t i) { return i == 0 ? ny - 1 : i - 1; };
  const auto up = [&](std::size_t i) { return i + 1 == ny ? 0 : i + 1; };

  // Per-cell flux data for the mass equation.
  const std::size_t cells = state.cells();
  std::vector<double> cval(cells), alpha(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    cval[i] = t.c_of_rho(state.rho[i]);
    alpha[i] = std::fabs(cval[i]) +
               state.rho[i] * std::fabs(t.c_slope(state.rho[i]));
  }
  const auto mass_flux = [&](std::size_t a, std::size_t b, double oa,
                             double ob) {
    const double ga = cval[a] * state.rho[a] * oa;
    const double gb = cval[b] * state.rho[b] * ob;
    const double am = std::max(alpha[a], alpha[b]);
    return 0.5 * (ga + gb) - 0.5 * am * (state.rho[b] - state.rho[a]);
  };

  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t i = idx(ix, iy);
      const std::size_t ie = idx(right(ix), iy);
      const std::size_t iw = idx(left(ix), iy);
      double div = (mass_flux(i, ie, state.omega_x[i], state.omega_x[ie]) -
                    mass_flux(iw, i, state.omega_x[iw], state.omega_x[i])) /
                   dx;
      if (ny > 1) {
        const std::size_t in = idx(ix, up(iy));
        const std::size_t is = idx(ix, down(iy));
        div += (mass_flux(i, in, state.omega_y[i], state.omega_y[in]) -
                mass_flux(is, i, state.omega_y[is], state.omega_y[i])) /
               dy;
      }
      out.rho[i] = state.rho[i] - dt * div;
    }
  }

  // Positivity limiter: clip and restore the total mass.
  double mass_before = 0.0, mass_after = 0.0;
  bool clipped = false;
  for (std::size_t i = 0; i < cells; ++i) {
    mass_before += out.rho[i];
    if (out.rho[i] < 0.0) {
      out.rho[i] = 0.0;
      clipped = true;
    }
    mass_after += out.rho[i];
  }
  if (clipped) {
    out.limiter_events += 1;
    if (mass_after > 0.0) {
      const double scalef = mass_before / mass_after;
      for (auto& r : out.rho) r *= scalef;
    }
  }

  if (ny == 1) {
    // 1D: advance the orientation angle directly.
    for (std::size_t i = 0; i < nx; ++i) {
      const double eta = std::atan2(state.omega_y[i], state.omega_x[i]);
      const double etaw =
          std::atan2(state.omega_y[left(i)], state.omega_x[left(i)]);
      const double etae =
          std::atan2(state.omega_y[right(i)], state.omega_x[right(i)]);
      const double a = t.b_of_rho(state.rho[i]) * std::cos(eta);
      const double etax =
          (a > 0.0 ? wrap_angle(eta - etaw) : wrap_angle(etae - eta)) / dx;
      const double rhox =
          (state.rho[right(i)] - state.rho[left(i)]) / (2.0 * dx);
      const double etatime =
          -a * etax + t.theta_of_rho(state.rho[i]) * std::sin(eta) * rhox;
      const double eta_new = eta + dt * etatime;
      out.omega_x[i] = std::cos(eta_new);
      out.omega_y[i] = std::sin(eta_new);
    }
  } else {
    // 2D: vector update with upwinding along the orientation, central
    // density gradient projected off the orientation, then renormalize.
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const std::size_t i = idx(ix, iy);
        const std::size_t ie = idx(right(ix), iy), iw = idx(left(ix), iy);
        const std::size_t in = idx(ix, up(iy)), is = idx(ix, down(iy));
        const double bloc = t.b_of_rho(state.rho[i]);
        const double vx = bloc * state.omega_x[i];
        const double vy = bloc * state.omega_y[i];

        const auto dx_up = [&](const std::vector<double>& w) {
          return (vx > 0.0 ? w[i] - w[iw] : w[ie] - w[i]) / dx;
        };
        const auto dy_up = [&](const std::vector<double>& w) {
          return (vy > 0.0 ? w[i] - w[is] : w[in] - w[i]) / dy;
        };
        const double adv_x = vx * dx_up(state.omega_x) +
                             vy * dy_up(state.omega_x);
        const double adv_y = vx * dx_up(state.omega_y) +
                             vy * dy_up(state.omega_y);

        const double rx = (state.rho[ie] - state.rho[iw]) / (2.0 * dx);
        const double ry = (state.rho[in] - state.rho[is]) / (2.0 * dy);
        const double par = rx * state.omega_x[i] + ry * state.omega_y[i];
        const double th = t.theta_of_rho(state.rho[i]);
        const double sx = th * (rx - par * state.omega_x[i]);
        const double sy = th * (ry - par * state.omega_y[i]);

        double wx = state.omega_x[i] - dt * (adv_x + sx);
        double wy = state.omega_y[i] - dt * (adv_y + sy);
        const double norm = std::hypot(wx, wy);
        if (norm > 0.0) {
          wx /= norm;
          wy /= norm;
        } else {
          wx = state.omega_x[i];
          wy = state.omega_y[i];
        }
        out.omega_x[i] = wx;
        out.omega_y[i] = wy;
      }
    }
  }

  out.time = state.time + dt;
  return out;
}

MacroTrajectory run(const MacroFields& state, const CoefficientTable& t,
                    double t_end, std::size_t record_every) {
  check_macro(state);
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  const std::size_t every = std::max<std::size_t>(1, record_every);

  MacroTrajectory traj;
  MacroFields cur = state;
  traj.times.push_back(cur.time);
  traj.states.push_back(cur);

  double elapsed = 0.0;
  std::size_t k = 0;
  while (elapsed < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double remaining = t_end - elapsed;
    const double dt = std::min(stable_macro_dt(cur, t), remaining);
    cur = step(cur, t, dt);
    elapsed += dt;
    ++k;
    const bool done = elapsed >= t_end - 1e-12 * std::max(1.0, t_end);
    if (k % every == 0 || done) {
      traj.times.push_back(cur.time);
      traj.states.push_back(cur);
    }
  }
  traj.limiter_engaged = cur.limiter_events;
  return traj;
}

}  // namespace mfg
