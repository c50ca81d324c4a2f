#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mfglab/manifold.hpp"

namespace mfg {

/// Microscopic ensemble of agents moving in the plane; each agent carries a
/// unit decision vector on the circle. Stored as structure-of-arrays so the
/// per-step update can run through the SIMD kernels.
///
/// The pseudo-random state is the pair (seed, step_count): every agent-step
/// draws from a fresh counter-based stream, see rng.hpp. make_ensemble
/// consumes step index 0 for the initial decisions, so stepping starts at 1.
struct ParticleEnsemble {
  std::vector<double> position_x, position_y;
  std::vector<double> decision_x, decision_y;
  std::uint64_t seed = 0;
  std::uint64_t step_count = 1;
  double time = 0.0;

  std::size_t size() const { return decision_x.size(); }
};

enum class SpatialKernel { Global, None };

struct ParticleRunConfig {
  std::size_t n_agents = 1000;
  double d = 0.2;
  double dt = 1e-3;
  double t_end = 1.0;
  double interaction_strength = 1.0;
  SpatialKernel spatial_kernel = SpatialKernel::Global;
  std::uint64_t seed = 0;
};

struct ParticleTrace {
  std::vector<double> times;
  /// |W_N|, the modulus of the ensemble-mean decision.
  std::vector<double> order_norm;
  /// -interaction_strength/2 * |W_N|^2, the discrete interaction energy.
  std::vector<double> energy;
  ParticleEnsemble final_state;
};

/// Agents at the origin with decisions drawn uniformly on the circle.
ParticleEnsemble make_ensemble(std::size_t n_agents, std::uint64_t seed);

/// Decisions sampled from the concentrated equilibrium with parameter kappa
/// around direction theta0 (numeric inverse-transform sampling).
ParticleEnsemble make_vmf_ensemble(std::size_t n_agents, double kappa,
                                   double theta0, std::uint64_t seed);

/// Ensemble-mean decision W_N.
std::array<double, 2> mean_decision(const ParticleEnsemble& e);

/// Steepest-descent direction of the herding cost at unit strength:
/// the mean decision projected onto the tangent line at agent j.
std::array<double, 2> force(const ParticleEnsemble& e, std::size_t j);

/// One projected Euler-Heun step with renormalized decisions and explicit
/// Euler positions. The increment composes drift and noise as a single
/// projected update; noise variance is 2 d dt per ambient component.
/// With d = 0 the interaction energy is non-increasing provided
/// interaction_strength * dt <= 0.5.
ParticleEnsemble step(ParticleEnsemble e, const ParticleRunConfig& cfg);

/// Steps until t_end, recording diagnostics every record_every steps
/// (plus the initial and final states).
ParticleTrace run(ParticleEnsemble e, const ParticleRunConfig& cfg,
                  std::size_t record_every = 1);

/// Nearest-node histogram of the decisions as a density on a circle grid.
GridFunction empirical_density(const ParticleEnsemble& e, const GridPtr& grid);

}  // namespace mfg
