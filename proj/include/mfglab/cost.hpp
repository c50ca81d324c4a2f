#pragma once

#include <array>
#include <variant>

#include "mfglab/manifold.hpp"

// Cost functionals, the chemical potential, and the potential-game energy
// ledger (entropy, potential energy, free energy, social cost, dissipation)
// for the herding interaction and for user-supplied fixed costs.

namespace mfg {

/// A cost that does not depend on the density.
struct FixedCost {
  GridFunction phi;
};

/// Alignment interaction: Phi_f(y) = -strength * y . W_f, where W_f is the
/// mean decision vector of f.
struct Herding {
  double interaction_strength = 1.0;
};

using CostKind = std::variant<FixedCost, Herding>;

struct EnergyReport {
  /// d * integral of f log f (zero-point set by the measure normalization).
  double entropy = 0.0;
  double potential_energy = 0.0;
  /// entropy + potential_energy.
  double free_energy = 0.0;
  /// Aggregate cost: integral of mu_f f.
  double social_cost = 0.0;
  /// W_f, the mean decision vector of f.
  std::array<double, 2> order_vector{0.0, 0.0};
  /// Integral of f |grad mu_f|^2; nonnegative, zero exactly at equilibria.
  double dissipation = 0.0;
};

/// Evaluates the cost Phi at every node. FixedCost returns its field
/// unchanged; Herding computes -strength * y . W_f from the current f.
GridFunction cost_field(const CostKind& kind, const GridFunction& f);

/// mu_f(y) = Phi_f(y) + d log f(y). Throws DomainError naming the first
/// node where f <= 0.
GridFunction chemical_potential(const CostKind& kind, const GridFunction& f,
                                double d);

EnergyReport energy_report(const CostKind& kind, const GridFunction& f,
                           double d);

}  // namespace mfg
