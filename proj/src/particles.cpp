#include "mfglab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "mfglab/errors.hpp"
#include "mfglab/kernels.hpp"
#include "mfglab/rng.hpp"

namespace mfg {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

void check_ensemble(const ParticleEnsemble& e) {
  const std::size_t n = e.decision_x.size();
  if (n == 0 || e.decision_y.size() != n || e.position_x.size() != n ||
      e.position_y.size() != n) {
    throw StructuralError("particle ensemble arrays are empty or mismatched");
  }
}

}  // namespace

ParticleEnsemble make_ensemble(std::size_t n_agents, std::uint64_t seed) {
  ParticleEnsemble e;
  e.seed = seed;
  e.position_x.assign(n_agents, 0.0);
  e.position_y.assign(n_agents, 0.0);
  e.decision_x.resize(n_agents);
  e.decision_y.resize(n_agents);
  for (std::size_t j = 0; j < n_agents; ++j) {
    rng::SplitMix64 g(rng::stream_key(seed, 0, j));
    const double theta = kTwoPi * g.next_unit();
    e.decision_x[j] = std::cos(theta);
    e.decision_y[j] = std::sin(theta);
  }
  return e;
}

ParticleEnsemble make_vmf_ensemble(std::size_t n_agents, double kappa,
                                   double theta0, std::uint64_t seed) {
  // Tabulated inverse-transform sampling of the angle offset on [-pi, pi].
  constexpr std::size_t kTable = 4096;
  std::vector<double> cdf(kTable + 1, 0.0);
  const double h = kTwoPi / kTable;
  double prev = std::exp(kappa * (std::cos(-0.5 * kTwoPi) - 1.0));
  for (std::size_t i = 1; i <= kTable; ++i) {
    const double phi = -0.5 * kTwoPi + h * static_cast<double>(i);
    const double cur = std::exp(kappa * (std::cos(phi) - 1.0));
    cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  for (auto& c : cdf) c /= cdf[kTable];

  ParticleEnsemble e;
  e.seed = seed;
  e.position_x.assign(n_agents, 0.0);
  e.position_y.assign(n_agents, 0.0);
  e.decision_x.resize(n_agents);
  e.decision_y.resize(n_agents);
  for (std::size_t j = 0; j < n_agents; ++j) {
    rng::SplitMix64 g(rng::stream_key(seed, 0, j));
    const double u = g.next_unit();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t i =
        std::min<std::size_t>(kTable, std::max<std::ptrdiff_t>(
                                          1, it - cdf.begin())) - 1;
    const double span = cdf[i + 1] - cdf[i];
    const double frac = span > 0.0 ? (u - cdf[i]) / span : 0.5;
    const double phi =
        -0.5 * kTwoPi + h * (static_cast<double>(i) + frac);
    e.decision_x[j] = std::cos(theta0 + phi);
    e.decision_y[j] = std::sin(theta0 + phi);
  }
  return e;
}

std::array<double, 2> mean_decision(const ParticleEnsemble& e) {
  check_ensemble(e);
  const auto& ops = kernels::active_ops();
  const double n = static_cast<double>(e.size());
  return {ops.sum(e.decision_x.data(), e.size()) / n,
          ops.sum(e.decision_y.data(), e.size()) / n};
}

std::array<double, 2> force(const ParticleEnsemble& e, std::size_t j) {
  check_ensemble(e);
  if (j >= e.size()) {
    throw DomainError("agent index out of range", j,
                      static_cast<double>(e.size()));
  }
  const auto w = mean_decision(e);
  const double yx = e.decision_x[j];
  const double yy = e.decision_y[j];
  const double par = w[0] * yx + w[1] * yy;
  return {w[0] - par * yx, w[1] - par * yy};
}

ParticleEnsemble step(ParticleEnsemble e, const ParticleRunConfig& cfg) {
  check_ensemble(e);
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  const std::size_t n = e.size();
  const auto& ops = kernels::active_ops();

  double gx_dt = 0.0, gy_dt = 0.0;
  if (cfg.spatial_kernel == SpatialKernel::Global) {
    const auto w = mean_decision(e);
    gx_dt = cfg.interaction_strength * w[0] * cfg.dt;
    gy_dt = cfg.interaction_strength * w[1] * cfg.dt;
  }

  // Positions advect with the pre-step decisions.
  ops.axpby(cfg.dt, e.decision_x.data(), 1.0, e.position_x.data(), n);
  ops.axpby(cfg.dt, e.decision_y.data(), 1.0, e.position_y.data(), n);

  const double sigma = std::sqrt(2.0 * cfg.d * cfg.dt);
  static thread_local std::vector<double> xi1, xi2;
  xi1.assign(n, 0.0);
  xi2.assign(n, 0.0);
  if (sigma > 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      rng::SplitMix64 g(rng::stream_key(e.seed, e.step_count, j));
      const auto z = rng::normal_pair(g);
      xi1[j] = z[0];
      xi2[j] = z[1];
    }
  }
  ops.heun_circle(e.decision_x.data(), e.decision_y.data(), xi1.data(),
                  xi2.data(), gx_dt, gy_dt, sigma, n);

  e.step_count += 1;
  e.time += cfg.dt;
  return e;
}

ParticleTrace run(ParticleEnsemble e, const ParticleRunConfig& cfg,
                  std::size_t record_every) {
  check_ensemble(e);
  const std::size_t n_steps =
      static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
  const std::size_t every = std::max<std::size_t>(1, record_every);

  ParticleTrace trace;
  const auto record = [&]() {
    const auto w = mean_decision(e);
    const double w2 = w[0] * w[0] + w[1] * w[1];
    trace.times.push_back(e.time);
    trace.order_norm.push_back(std::sqrt(w2));
    trace.energy.push_back(-0.5 * cfg.interaction_strength * w2);
  };

  record();
  for (std::size_t k = 0; k < n_steps; ++k) {
    e = step(std::move(e), cfg);
    if ((k + 1) % every == 0 || k + 1 == n_steps) record();
  }
  trace.final_state = std::move(e);
  return trace;
}

GridFunction empirical_density(const ParticleEnsemble& e,
                               const GridPtr& grid) {
  check_ensemble(e);
  if (!grid || grid->kind != ManifoldKind::Circle) {
    throw UnsupportedOperation(
        "empirical densities require a circle grid matching the planar "
        "decisions");
  }
  const std::size_t cells = grid->size();
  std::vector<double> counts(cells, 0.0);
  const double h = grid->spacing;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const double theta = std::atan2(e.decision_y[j], e.decision_x[j]);
    long long k = std::llround(theta / h) % static_cast<long long>(cells);
    if (k < 0) k += static_cast<long long>(cells);
    counts[static_cast<std::size_t>(k)] += 1.0;
  }
  const double n = static_cast<double>(e.size());
  for (std::size_t k = 0; k < cells; ++k) {
    counts[k] /= n * grid->weights[k];
  }
  return GridFunction(grid, std::move(counts));
}

}  // namespace mfg
