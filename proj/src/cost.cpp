#include "mfglab/cost.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mfglab/errors.hpp"

namespace mfg {

namespace {

// y . W at a grid node, in the manifold's ambient pairing.
double node_dot(const ManifoldGrid& grid, std::size_t k,
                const std::array<double, 2>& w) {
  switch (grid.kind) {
    case ManifoldKind::Circle:
      return std::cos(grid.nodes[k]) * w[0] + std::sin(grid.nodes[k]) * w[1];
    case ManifoldKind::SphereAxisymmetric:
      return std::cos(grid.nodes[k]) * w[0];
    case ManifoldKind::TwoPoint:
    case ManifoldKind::Interval:
      return grid.nodes[k] * w[0];
  }
  return 0.0;
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

GridFunction cost_field(const CostKind& kind, const GridFunction& f) {
  check_structure(f);
  if (const auto* fixed = std::get_if<FixedCost>(&kind)) {
    check_structure(fixed->phi);
    if (fixed->phi.size() != f.size()) {
      throw StructuralError("fixed cost field does not match the density grid");
    }
    return fixed->phi;
  }
  const auto& herd = std::get<Herding>(kind);
  const auto w = mean_decision_vector(f);
  const auto& grid = *f.grid;
  std::vector<double> phi(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    phi[k] = -herd.interaction_strength * node_dot(grid, k, w);
  }
  return GridFunction(f.grid, std::move(phi));
}

GridFunction chemical_potential(const CostKind& kind, const GridFunction& f,
                                double d) {
  GridFunction mu = cost_field(kind, f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!(f.values[k] > 0.0)) {
      throw DomainError("chemical potential needs f > 0, node " +
                            std::to_string(k) + " has value " +
                            std::to_string(f.values[k]),
                        k, f.values[k]);
    }
    mu.values[k] += d * std::log(f.values[k]);
  }
  return mu;
}

EnergyReport energy_report(const CostKind& kind, const GridFunction& f,
                           double d) {
  check_structure(f);
  EnergyReport report;
  report.order_vector = mean_decision_vector(f);

  std::vector<double> flogf(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) flogf[k] = xlogx(f.values[k]);
  report.entropy = d * integrate(GridFunction(f.grid, std::move(flogf)));

  const GridFunction phi = cost_field(kind, f);
  std::vector<double> phif(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    phif[k] = phi.values[k] * f.values[k];
  }
  const double interaction = integrate(GridFunction(f.grid, std::move(phif)));

  if (std::holds_alternative<Herding>(kind)) {
    // The interaction energy double-counts pairs: U = -s|W|^2/2, while
    // integral of Phi_f f = -s|W|^2.
    report.potential_energy = 0.5 * interaction;
  } else {
    report.potential_energy = interaction;
  }
  report.free_energy = report.entropy + report.potential_energy;
  // integral of mu_f f = integral of Phi_f f + d integral of f log f,
  // evaluated without requiring full support (0 log 0 = 0).
  report.social_cost = interaction + report.entropy;

  // Dissipation: integral of f |grad mu|^2. mu needs full support; for
  // densities with vacuum nodes (deltas, raw histograms) the report keeps
  // dissipation at 0 rather than erroring, matching the 0 log 0 = 0
  // convention used above.
  const auto& grid = *f.grid;
  bool full_support = true;
  for (const double v : f.values) {
    if (!(v > 0.0)) {
      full_support = false;
      break;
    }
  }
  if (full_support) {
    const GridFunction mu = chemical_potential(kind, f, d);
    if (grid.kind == ManifoldKind::TwoPoint) {
      // Edge-difference surrogate for |grad mu| with edge length 2.
      const double dmu = 0.5 * (mu.values[1] - mu.values[0]);
      report.dissipation = dmu * dmu * integrate(f);
    } else {
      const GridFunction dmu = tangential_gradient(mu);
      std::vector<double> integrand(f.size());
      for (std::size_t k = 0; k < f.size(); ++k) {
        integrand[k] = f.values[k] * dmu.values[k] * dmu.values[k];
      }
      report.dissipation =
          integrate(GridFunction(f.grid, std::move(integrand)));
    }
  } else {
    report.dissipation = 0.0;
  }
  return report;
}

}  // namespace mfg
