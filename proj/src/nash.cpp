#include "mfglab/nash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mfglab/errors.hpp"
#include "mfglab/kernels.hpp"

namespace mfg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Mean and spread of the chemical potential on f.
struct MuStats {
  double mean;
  double deviation;
  double residual;
};

MuStats mu_stats(const CostKind& kind, const GridFunction& f, double d) {
  const GridFunction mu = chemical_potential(kind, f, d);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double mean = 0.0;
  double measure = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    lo = std::min(lo, mu.values[k]);
    hi = std::max(hi, mu.values[k]);
    mean += mu.grid->weights[k] * mu.values[k];
    measure += mu.grid->weights[k];
  }
  mean /= measure;
  double res = 0.0;
  for (const double v : mu.values) {
    res = std::max(res, std::fabs(v - mean));
  }
  return {mean, hi - lo, res};
}

// c(kappa) for n = 2: ratio of integrals of cos(t) exp(kappa cos t) and
// exp(kappa cos t) over the circle, with exp(kappa) factored out so large
// kappa stays finite. Periodic trapezoid converges spectrally; the point
// count grows with kappa to keep the concentration resolved.
double order_circle(double kappa) {
  const int m = std::max(256, 4 * static_cast<int>(std::ceil(kappa)));
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * kPi * j / m;
    const double c = std::cos(t);
    const double e = std::exp(kappa * (c - 1.0));
    num += c * e;
    den += e;
  }
  return num / den;
}

// c(kappa) for n = 3 has the closed form coth(kappa) - 1/kappa; the series
// avoids the small-kappa cancellation.
double order_sphere(double kappa) {
  if (kappa < 0.05) {
    const double k2 = kappa * kappa;
    return kappa * (1.0 / 3.0 - k2 / 45.0 + 2.0 * k2 * k2 / 945.0);
  }
  return 1.0 / std::tanh(kappa) - 1.0 / kappa;
}

}  // namespace

GridFunction gibbs(const GridFunction& phi, double d) {
  check_structure(phi);
  if (!(d > 0.0)) throw DomainError("gibbs needs d > 0");
  const double phi_min =
      *std::min_element(phi.values.begin(), phi.values.end());
  std::vector<double> v(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    v[k] = std::exp(-(phi.values[k] - phi_min) / d);
  }
  GridFunction f(phi.grid, std::move(v));
  const double z = integrate(f);
  kernels::active_ops().scale(1.0 / z, f.values.data(), f.size());
  return f;
}

double partition_function(const GridFunction& phi, double d) {
  check_structure(phi);
  if (!(d > 0.0)) throw DomainError("partition function needs d > 0");
  const double phi_min =
      *std::min_element(phi.values.begin(), phi.values.end());
  std::vector<double> v(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    v[k] = std::exp(-(phi.values[k] - phi_min) / d);
  }
  const double z_shifted = integrate(GridFunction(phi.grid, std::move(v)));
  return z_shifted * std::exp(-phi_min / d);
}

EquilibriumSolution fixed_point(const CostKind& kind, double d,
                                const GridFunction& init, double damping,
                                double tol, std::size_t max_iter) {
  check_structure(init);
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw DomainError("damping must lie in (0, 1]");
  }
  if (!(d > 0.0)) throw DomainError("fixed_point needs d > 0");

  GridFunction f = init;
  {
    const double mass = integrate(f);
    kernels::active_ops().scale(1.0 / mass, f.values.data(), f.size());
  }

  double increment = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < max_iter) {
    const GridFunction target = gibbs(cost_field(kind, f), d);
    increment = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      increment += f.grid->weights[k] *
                   std::fabs(target.values[k] - f.values[k]) * damping;
    }
    kernels::active_ops().axpby(damping, target.values.data(), 1.0 - damping,
                                f.values.data(), f.size());
    ++it;
    if (increment < tol) {
      residual = mu_stats(kind, f, d).residual;
      if (residual <= tol) break;
    }
  }
  if (increment >= tol || residual > tol) {
    throw NumericalError(
        "fixed point did not converge in " + std::to_string(max_iter) +
            " iterations (residual " + std::to_string(residual) +
            "); retry with smaller damping",
        std::isfinite(residual) ? residual : increment);
  }

  EquilibriumSolution sol;
  const auto stats = mu_stats(kind, f, d);
  sol.partition = partition_function(cost_field(kind, f), d);
  sol.density = std::move(f);
  sol.chemical_constant = stats.mean;
  sol.iterations = it;
  sol.residual = stats.residual;
  return sol;
}

double order_parameter(double kappa, int n) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("order parameter needs finite kappa >= 0");
  }
  if (kappa == 0.0) return 0.0;
  switch (n) {
    case 1:
      return std::tanh(kappa);
    case 2:
      return order_circle(kappa);
    case 3:
      return order_sphere(kappa);
    default:
      throw DomainError("order parameter supports n in {1, 2, 3}, got " +
                        std::to_string(n));
  }
}

PhaseDiagnosis kappa_solve(double d_eff, int n) {
  if (!(d_eff > 0.0)) throw DomainError("kappa_solve needs d_eff > 0");
  if (n < 1 || n > 3) {
    throw DomainError("kappa_solve supports n in {1, 2, 3}");
  }
  PhaseDiagnosis diag;
  diag.critical_noise = 1.0 / n;
  if (d_eff >= diag.critical_noise) {
    diag.regime = PhaseRegime::UniformOnly;
    diag.kappa_d = 0.0;
    return diag;
  }
  diag.regime = PhaseRegime::Bistable;

  const auto g = [&](double kappa) {
    return order_parameter(kappa, n) - d_eff * kappa;
  };
  double lo = 1e-6;
  double hi = std::max(50.0, 4.0 / d_eff);
  // g > 0 just above 0 (slope 1/n > d_eff) and g < 0 at the upper bracket
  // end (c < 1 <= d_eff * hi).
  double mid = lo;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double val = g(mid);
    if (std::fabs(val) < 1e-12) break;
    if (val > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
  }
  diag.kappa_d = mid;
  return diag;
}

double order_parameter_derivative(double kappa, int n) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw DomainError("order parameter derivative needs finite kappa >= 0");
  }
  switch (n) {
    case 1: {
      const double c = std::tanh(kappa);
      return 1.0 - c * c;
    }
    case 2: {
      if (kappa < 1e-8) return 0.5;
      const double c = order_parameter(kappa, 2);
      return 1.0 - c / kappa - c * c;
    }
    case 3: {
      if (kappa < 0.1) {
        const double k2 = kappa * kappa;
        return 1.0 / 3.0 - k2 / 15.0 + 2.0 * k2 * k2 / 189.0;
      }
      const double s = std::sinh(kappa);
      return 1.0 / (kappa * kappa) - 1.0 / (s * s);
    }
    default:
      throw DomainError("order parameter derivative supports n in {1, 2, 3}");
  }
}

VmfEquilibrium vmf_equilibrium(double d_eff, int n,
                               std::array<double, 2> omega) {
  const auto diag = kappa_solve(d_eff, n);
  VmfEquilibrium eq;
  eq.kappa = diag.kappa_d;
  eq.order = order_parameter(eq.kappa, n);
  const double norm = std::sqrt(omega[0] * omega[0] + omega[1] * omega[1]);
  if (!(norm > 0.0)) throw DomainError("mean direction must be nonzero");
  eq.omega = {omega[0] / norm, omega[1] / norm};
  switch (n) {
    case 1:
      eq.partition = std::cosh(eq.kappa);
      break;
    case 2: {
      // Z = (1/2pi) integral exp(kappa cos t) dt; periodic trapezoid.
      constexpr int m = 4096;
      double z = 0.0;
      for (int j = 0; j < m; ++j) {
        z += std::exp(eq.kappa * std::cos(2.0 * kPi * j / m));
      }
      eq.partition = z / m;
      break;
    }
    case 3:
      eq.partition = eq.kappa > 1e-8 ? std::sinh(eq.kappa) / eq.kappa : 1.0;
      break;
  }
  return eq;
}

GridFunction vmf_density(const GridPtr& grid, double kappa, double theta0) {
  if (!grid) throw StructuralError("vmf_density needs a grid");
  std::vector<double> v(grid->size());
  switch (grid->kind) {
    case ManifoldKind::Circle:
      for (std::size_t k = 0; k < grid->size(); ++k) {
        v[k] = std::exp(kappa * (std::cos(grid->nodes[k] - theta0) - 1.0));
      }
      break;
    case ManifoldKind::SphereAxisymmetric:
      for (std::size_t k = 0; k < grid->size(); ++k) {
        v[k] = std::exp(kappa * (std::cos(grid->nodes[k]) - 1.0));
      }
      break;
    default:
      throw UnsupportedOperation(
          "vmf_density supports Circle and SphereAxisymmetric grids");
  }
  GridFunction f(grid, std::move(v));
  const double z = integrate(f);
  kernels::active_ops().scale(1.0 / z, f.values.data(), f.size());
  return f;
}

VerifyResult verify(const CostKind& kind, const GridFunction& f, double d,
                    double tol) {
  const auto stats = mu_stats(kind, f, d);
  VerifyResult result;
  result.constant = stats.mean;
  result.deviation = stats.deviation;
  result.accepted = stats.deviation < tol;
  return result;
}

}  // namespace mfg
