#pragma once

#include <array>
#include <cstddef>

#include "mfglab/cost.hpp"
#include "mfglab/manifold.hpp"

// Equilibrium machinery: Gibbs map, damped self-consistent iteration,
// Nash-equilibrium verification, the alignment order parameter c(kappa) of
// the von Mises-Fisher family, the compatibility equation c(kappa) =
// d_eff * kappa, and the phase classification it induces.

namespace mfg {

struct EquilibriumSolution {
  GridFunction density;
  /// The constant value of the chemical potential at equilibrium.
  double chemical_constant = 0.0;
  /// Partition function Z of the final Gibbs evaluation.
  double partition = 1.0;
  std::size_t iterations = 0;
  /// Sup-norm of mu_f minus its mean on the converged density.
  double residual = 0.0;
};

struct VmfEquilibrium {
  double kappa = 0.0;
  std::array<double, 2> omega{1.0, 0.0};
  /// c(kappa), the alignment order parameter.
  double order = 0.0;
  /// Normalization Z_kappa of exp(kappa y.Omega) in the unit measure.
  double partition = 1.0;
};

enum class PhaseRegime { UniformOnly, Bistable };

struct PhaseDiagnosis {
  PhaseRegime regime = PhaseRegime::UniformOnly;
  /// Positive root of c(kappa) = d_eff * kappa; 0 in the UniformOnly phase.
  double kappa_d = 0.0;
  /// Threshold noise level 1/n separating the phases.
  double critical_noise = 0.0;
};

struct VerifyResult {
  bool accepted = false;
  /// Mean of the chemical potential in the grid measure.
  double constant = 0.0;
  /// max mu - min mu.
  double deviation = 0.0;
};

/// Normalized Gibbs density exp(-Phi/d)/Z. Shift-invariant in Phi; the
/// exponent is centered before exponentiating to avoid overflow.
GridFunction gibbs(const GridFunction& phi, double d);

/// Partition function of the last gibbs() style normalization for a given
/// cost field: integral of exp(-Phi/d).
double partition_function(const GridFunction& phi, double d);

/// Damped iteration f <- (1-damping) f + damping gibbs(Phi_f, d), run until
/// the L1 increment and the chemical-potential residual both drop below
/// tol. Throws NumericalError (with the last residual) past max_iter.
EquilibriumSolution fixed_point(const CostKind& kind, double d,
                                const GridFunction& init,
                                double damping = 0.5, double tol = 1e-10,
                                std::size_t max_iter = 10000);

/// Order parameter c(kappa) of the VMF family on S^{n-1}: tanh(kappa) for
/// n = 1, stable trapezoid quadrature of the cosine ratio for n = 2,
/// coth(kappa) - 1/kappa for n = 3. Strictly increasing, c(0) = 0,
/// c -> 1 as kappa -> inf.
double order_parameter(double kappa, int n);

/// dc/dkappa, via the closed-form identities for each n; equals 1/n at 0.
double order_parameter_derivative(double kappa, int n);

/// Solves the compatibility condition c(kappa) = d_eff * kappa.
PhaseDiagnosis kappa_solve(double d_eff, int n);

/// VMF equilibrium data at the phase point d_eff on S^{n-1} with the given
/// mean direction (a 2-vector for the circle, the axial sign in [0]
/// otherwise).
VmfEquilibrium vmf_equilibrium(double d_eff, int n,
                               std::array<double, 2> omega = {1.0, 0.0});

/// Samples the VMF density exp(kappa cos(theta - theta0))/Z on a Circle
/// grid, or exp(kappa cos(theta))/Z on a SphereAxisymmetric grid
/// (theta0 ignored there). Normalized by the grid quadrature.
GridFunction vmf_density(const GridPtr& grid, double kappa,
                         double theta0 = 0.0);

/// Nash test: accepted iff the chemical potential is constant within tol.
VerifyResult verify(const CostKind& kind, const GridFunction& f, double d,
                    double tol);

}  // namespace mfg
