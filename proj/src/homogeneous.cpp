#include "mfglab/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mfglab/errors.hpp"
#include "mfglab/kernels.hpp"
#include "mfglab/nash.hpp"

namespace mfg {

namespace {

// B(z) = z / (e^z - 1); B(0) = 1, B(-z) = B(z) + z.
double bernoulli_b(double z) {
  if (z == 0.0) return 1.0;
  const double e = std::expm1(z);
  if (std::isinf(e)) return 0.0;
  return z / e;
}

// Measure density at the faces between consecutive nodes. The circle has n
// faces (periodic); interval and sphere have n-1 interior faces, with the
// boundary fluxes identically zero.
std::vector<double> face_densities(const ManifoldGrid& grid) {
  const std::size_t n = grid.size();
  switch (grid.kind) {
    case ManifoldKind::Circle:
      return std::vector<double>(n, 1.0 / (2.0 * 3.14159265358979323846));
    case ManifoldKind::Interval:
      return std::vector<double>(n - 1, 1.0);
    case ManifoldKind::SphereAxisymmetric: {
      std::vector<double> sigma(n - 1);
      for (std::size_t k = 0; k + 1 < n; ++k) {
        sigma[k] = 0.5 * std::sin(static_cast<double>(k + 1) * grid.spacing);
      }
      return sigma;
    }
    case ManifoldKind::TwoPoint:
      return {};
  }
  return {};
}

double max_face_gradient(const GridFunction& phi) {
  const auto& grid = *phi.grid;
  const std::size_t n = grid.size();
  double gmax = 0.0;
  const std::size_t faces = grid.periodic() ? n : n - 1;
  for (std::size_t k = 0; k < faces; ++k) {
    const std::size_t kp = (k + 1) % n;
    gmax = std::max(gmax,
                    std::fabs(phi.values[kp] - phi.values[k]) / grid.spacing);
  }
  return gmax;
}

// Clip tiny negative values, rescale back to the pre-clip mass if clipping
// happened, and error out on genuinely negative results.
void enforce_positivity(GridFunction& f, double dt) {
  bool clipped = false;
  const double mass_before = integrate(f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = f.values[k];
    if (v < -1e-12) {
      throw NumericalError(
          "density went negative (" + std::to_string(v) + " at node " +
              std::to_string(k) + "); the scheme is unstable at dt = " +
              std::to_string(dt) + ", retry with a smaller step",
          -v);
    }
    if (v < 0.0) {
      f.values[k] = 0.0;
      clipped = true;
    }
  }
  if (clipped) {
    const double mass = integrate(f);
    kernels::active_ops().scale(mass_before / mass, f.values.data(),
                                f.size());
  }
}

// Solves the symmetric-flip pair with the exponential-fitting face value;
// stationary states are exactly the two-atom Gibbs measures.
GridFunction step_two_point(const GridFunction& f, const GridFunction& phi,
                            const HomogeneousRunConfig& cfg) {
  const double d = cfg.d;
  const double s = (phi.values[1] - phi.values[0]) / d;
  const double b = bernoulli_b(s);
  // Gibbs atoms and the symmetric face value M~ = B(s) M_-.
  const double e0 = std::exp(-phi.values[0] / d);
  const double e1 = std::exp(-phi.values[1] / d);
  const double z = 0.5 * (e0 + e1);
  const double m0 = e0 / z;
  const double m1 = e1 / z;
  const double mtilde = b * m0;
  const double a0 = d * mtilde / m0;
  const double a1 = d * mtilde / m1;

  GridFunction out = f;
  if (cfg.scheme == Scheme::ExplicitFluxLimited) {
    const double q = a1 * f.values[1] - a0 * f.values[0];
    out.values[0] += cfg.dt * q;
    out.values[1] -= cfg.dt * q;
  } else {
    // (I - dt L) f' = f with L f = (+q, -q), solved in closed form.
    const double det = 1.0 + cfg.dt * (a0 + a1);
    const double q = (a1 * f.values[1] - a0 * f.values[0]) / det;
    out.values[0] += cfg.dt * q;
    out.values[1] -= cfg.dt * q;
  }
  enforce_positivity(out, cfg.dt);
  return out;
}

struct FaceData {
  std::vector<double> sigma;
  // Flux J_k = (d/h) sigma_k (B(-s_k) f_{k+1} - B(s_k) f_k).
  std::vector<double> b_plus;   // B(s_k)
  std::vector<double> b_minus;  // B(-s_k) = B(s_k) + s_k
};

FaceData build_faces(const GridFunction& phi, double d) {
  const auto& grid = *phi.grid;
  const std::size_t n = grid.size();
  FaceData fd;
  fd.sigma = face_densities(grid);
  const std::size_t faces = fd.sigma.size();
  fd.b_plus.resize(faces);
  fd.b_minus.resize(faces);
  for (std::size_t k = 0; k < faces; ++k) {
    const std::size_t kp = (k + 1) % n;
    const double s = (phi.values[kp] - phi.values[k]) / d;
    fd.b_plus[k] = bernoulli_b(s);
    fd.b_minus[k] = fd.b_plus[k] + s;
  }
  return fd;
}

// Divergence of the face fluxes divided by the cell masses.
std::vector<double> flux_divergence(const GridFunction& f, const FaceData& fd,
                                    double d, bool drift_only) {
  const auto& grid = *f.grid;
  const std::size_t n = grid.size();
  const double dh = d / grid.spacing;
  const std::size_t faces = fd.sigma.size();
  std::vector<double> flux(faces);
  for (std::size_t k = 0; k < faces; ++k) {
    const std::size_t kp = (k + 1) % n;
    const double bm = drift_only ? fd.b_minus[k] - 1.0 : fd.b_minus[k];
    const double bp = drift_only ? fd.b_plus[k] - 1.0 : fd.b_plus[k];
    flux[k] = dh * fd.sigma[k] * (bm * f.values[kp] - bp * f.values[k]);
  }
  std::vector<double> div(n);
  for (std::size_t k = 0; k < n; ++k) {
    double jr = 0.0;
    double jl = 0.0;
    if (grid.periodic()) {
      jr = flux[k];
      jl = flux[(k + n - 1) % n];
    } else {
      if (k < faces) jr = flux[k];
      if (k > 0) jl = flux[k - 1];
    }
    div[k] = (jr - jl) / grid.weights[k];
  }
  return div;
}

// Thomas solve of a tridiagonal system; lower/diag/upper are modified.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t k = 1; k < n; ++k) {
    const double m = lower[k] / diag[k - 1];
    diag[k] -= m * upper[k - 1];
    rhs[k] -= m * rhs[k - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    rhs[k] = (rhs[k] - upper[k] * rhs[k + 1]) / diag[k];
  }
}

// Implicit diffusion solve: (I - dt D) f' = rhs, where D is the pure
// diffusive part of the flux divergence. Periodic grids use the
// Sherman-Morrison correction for the corner entries.
std::vector<double> implicit_diffusion_solve(const GridFunction& f,
                                             const FaceData& fd, double d,
                                             double dt,
                                             std::vector<double> rhs) {
  const auto& grid = *f.grid;
  const std::size_t n = grid.size();
  const double dh = d / grid.spacing;

  // c_face(k) couples nodes k and k+1 with weight dt*dh*sigma_k / w.
  const auto couple = [&](std::size_t face, std::size_t node) {
    return dt * dh * fd.sigma[face] / grid.weights[node];
  };

  std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0);
  const std::size_t faces = fd.sigma.size();
  for (std::size_t k = 0; k < faces; ++k) {
    const std::size_t kp = (k + 1) % n;
    diag[k] += couple(k, k);
    upper[k] = (kp > k) ? -couple(k, k) : upper[k];
    diag[kp] += couple(k, kp);
    lower[kp] = (kp > k) ? -couple(k, kp) : lower[kp];
  }

  if (!grid.periodic()) {
    solve_tridiagonal(lower, diag, upper, rhs);
    return rhs;
  }

  // Periodic: the face n-1 couples nodes n-1 and 0.
  const double corner_upper = -couple(n - 1, n - 1);  // A[n-1][0]
  const double corner_lower = -couple(n - 1, 0);      // A[0][n-1]
  // Sherman-Morrison with u = (gamma, 0, ..., 0, corner_upper)^T,
  // v = (1, 0, ..., 0, corner_lower/gamma)^T.
  const double gamma = -diag[0];
  std::vector<double> d1 = diag;
  d1[0] -= gamma;
  d1[n - 1] -= corner_lower * corner_upper / gamma;

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_upper;

  auto l1 = lower;
  auto up1 = upper;
  auto rhs2 = u;
  solve_tridiagonal(l1, d1, up1, rhs);  // rhs <- y
  l1 = lower;
  d1 = diag;
  d1[0] -= gamma;
  d1[n - 1] -= corner_lower * corner_upper / gamma;
  up1 = upper;
  solve_tridiagonal(l1, d1, up1, rhs2);  // rhs2 <- q

  const double vy = rhs[0] + corner_lower / gamma * rhs[n - 1];
  const double vq = rhs2[0] + corner_lower / gamma * rhs2[n - 1];
  const double factor = vy / (1.0 + vq);
  for (std::size_t k = 0; k < n; ++k) rhs[k] -= factor * rhs2[k];
  return rhs;
}

}  // namespace

double stable_dt_bound(const GridFunction& f,
                       const HomogeneousRunConfig& cfg) {
  check_structure(f);
  const GridFunction phi = cost_field(cfg.kind, f);
  const double h = f.grid->spacing;
  if (cfg.scheme == Scheme::ExplicitFluxLimited) {
    return 0.4 * h * h / (2.0 * cfg.d);
  }
  const double gmax = (f.grid->kind == ManifoldKind::TwoPoint)
                          ? std::fabs(phi.values[1] - phi.values[0]) / h
                          : max_face_gradient(phi);
  if (gmax == 0.0) return std::numeric_limits<double>::infinity();
  return 0.25 * h / gmax;
}

GridFunction collision_operator(const GridFunction& f, const CostKind& kind,
                                double d) {
  check_structure(f);
  const GridFunction phi = cost_field(kind, f);
  if (f.grid->kind == ManifoldKind::TwoPoint) {
    GridFunction stepped = f;
    const double s = (phi.values[1] - phi.values[0]) / d;
    const double b = bernoulli_b(s);
    const double e0 = std::exp(-phi.values[0] / d);
    const double e1 = std::exp(-phi.values[1] / d);
    const double z = 0.5 * (e0 + e1);
    const double q = d * b * (e0 / z) *
                     (f.values[1] / (e1 / z) - f.values[0] / (e0 / z));
    stepped.values = {q, -q};
    return stepped;
  }
  const FaceData fd = build_faces(phi, d);
  return GridFunction(f.grid, flux_divergence(f, fd, d, false));
}

GridFunction step(const GridFunction& f, const HomogeneousRunConfig& cfg) {
  check_structure(f);
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  const double bound = stable_dt_bound(f, cfg);
  if (cfg.dt > bound) {
    throw ConfigError("dt = " + std::to_string(cfg.dt) +
                      " exceeds the stability bound " + std::to_string(bound) +
                      " of the chosen scheme");
  }
  const GridFunction phi = cost_field(cfg.kind, f);
  if (f.grid->kind == ManifoldKind::TwoPoint) {
    return step_two_point(f, phi, cfg);
  }

  const FaceData fd = build_faces(phi, cfg.d);
  GridFunction out = f;
  if (cfg.scheme == Scheme::ExplicitFluxLimited) {
    const auto div = flux_divergence(f, fd, cfg.d, false);
    for (std::size_t k = 0; k < f.size(); ++k) {
      out.values[k] += cfg.dt * div[k];
    }
  } else {
    const auto drift = flux_divergence(f, fd, cfg.d, true);
    std::vector<double> rhs(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      rhs[k] = f.values[k] + cfg.dt * drift[k];
    }
    out.values =
        implicit_diffusion_solve(f, fd, cfg.d, cfg.dt, std::move(rhs));
  }
  enforce_positivity(out, cfg.dt);
  return out;
}

TrajectoryRecord run(const GridFunction& f0, const HomogeneousRunConfig& cfg) {
  check_structure(f0);
  if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
  const std::size_t every = std::max<std::size_t>(1, cfg.record_every);

  TrajectoryRecord rec;
  GridFunction f = f0;
  const auto record = [&](double t) {
    const auto rep = energy_report(cfg.kind, f, cfg.d);
    rec.times.push_back(t);
    rec.mass.push_back(integrate(f));
    rec.free_energy.push_back(rep.free_energy);
    rec.dissipation.push_back(rep.dissipation);
    rec.order_norm.push_back(std::hypot(rep.order_vector[0],
                                        rep.order_vector[1]));
  };

  record(0.0);
  for (std::size_t k = 0; k < n_steps; ++k) {
    f = step(f, cfg);
    if ((k + 1) % every == 0 || k + 1 == n_steps) {
      record(cfg.dt * static_cast<double>(k + 1));
    }
  }
  rec.final_density = std::move(f);
  return rec;
}

}  // namespace mfg
