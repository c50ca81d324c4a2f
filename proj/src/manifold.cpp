#include "mfglab/manifold.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "mfglab/errors.hpp"
#include "mfglab/kernels.hpp"

namespace mfg {

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr finalize(ManifoldGrid grid) {
  return std::make_shared<const ManifoldGrid>(std::move(grid));
}

}  // namespace

GridPtr circle_grid(std::size_t n_nodes) {
  if (n_nodes < 3) throw StructuralError("circle grid needs >= 3 nodes");
  ManifoldGrid g;
  g.kind = ManifoldKind::Circle;
  g.spacing = 2.0 * kPi / static_cast<double>(n_nodes);
  g.nodes.resize(n_nodes);
  g.weights.assign(n_nodes, 1.0 / static_cast<double>(n_nodes));
  for (std::size_t k = 0; k < n_nodes; ++k) {
    g.nodes[k] = g.spacing * static_cast<double>(k);
  }
  return finalize(std::move(g));
}

GridPtr two_point_grid() {
  ManifoldGrid g;
  g.kind = ManifoldKind::TwoPoint;
  g.nodes = {-1.0, 1.0};
  g.weights = {0.5, 0.5};
  g.spacing = 2.0;
  return finalize(std::move(g));
}

GridPtr sphere_axisymmetric_grid(std::size_t n_nodes) {
  if (n_nodes < 3) throw StructuralError("sphere grid needs >= 3 nodes");
  ManifoldGrid g;
  g.kind = ManifoldKind::SphereAxisymmetric;
  const double h = kPi / static_cast<double>(n_nodes);
  g.spacing = h;
  g.nodes.resize(n_nodes);
  g.weights.resize(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double kd = static_cast<double>(k);
    g.nodes[k] = (kd + 0.5) * h;
    g.weights[k] = 0.5 * (std::cos(kd * h) - std::cos((kd + 1.0) * h));
  }
  return finalize(std::move(g));
}

GridPtr interval_grid(double lower, double upper, std::size_t n_nodes) {
  if (!(lower < upper)) {
    throw StructuralError("interval requires lower < upper");
  }
  if (n_nodes < 3) throw StructuralError("interval grid needs >= 3 nodes");
  ManifoldGrid g;
  g.kind = ManifoldKind::Interval;
  g.lower = lower;
  g.upper = upper;
  const double h = (upper - lower) / static_cast<double>(n_nodes - 1);
  g.spacing = h;
  g.nodes.resize(n_nodes);
  g.weights.assign(n_nodes, h);
  g.weights.front() = 0.5 * h;
  g.weights.back() = 0.5 * h;
  for (std::size_t k = 0; k < n_nodes; ++k) {
    g.nodes[k] = lower + h * static_cast<double>(k);
  }
  return finalize(std::move(g));
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  check_structure(*this);
}

GridFunction::GridFunction(GridPtr g, double constant) : grid(std::move(g)) {
  if (!grid) throw StructuralError("grid function without a grid");
  values.assign(grid->size(), constant);
}

void check_structure(const GridFunction& g) {
  if (!g.grid) throw StructuralError("grid function without a grid");
  if (g.values.size() != g.grid->size()) {
    throw StructuralError("grid function has " +
                          std::to_string(g.values.size()) + " values on a " +
                          std::to_string(g.grid->size()) + "-node grid");
  }
}

double integrate(const GridFunction& g) {
  check_structure(g);
  return kernels::active_ops().dot(g.grid->weights.data(), g.values.data(),
                                   g.size());
}

std::array<double, 2> mean_decision_vector(const GridFunction& g) {
  check_structure(g);
  const auto& grid = *g.grid;
  const std::size_t n = grid.size();
  std::array<double, 2> mean{0.0, 0.0};
  switch (grid.kind) {
    case ManifoldKind::Circle:
      for (std::size_t k = 0; k < n; ++k) {
        const double wv = grid.weights[k] * g.values[k];
        mean[0] += wv * std::cos(grid.nodes[k]);
        mean[1] += wv * std::sin(grid.nodes[k]);
      }
      break;
    case ManifoldKind::SphereAxisymmetric:
      for (std::size_t k = 0; k < n; ++k) {
        mean[0] += grid.weights[k] * g.values[k] * std::cos(grid.nodes[k]);
      }
      break;
    case ManifoldKind::TwoPoint:
    case ManifoldKind::Interval:
      for (std::size_t k = 0; k < n; ++k) {
        mean[0] += grid.weights[k] * g.values[k] * grid.nodes[k];
      }
      break;
  }
  return mean;
}

GridFunction tangential_gradient(const GridFunction& g) {
  check_structure(g);
  const auto& grid = *g.grid;
  if (grid.kind == ManifoldKind::TwoPoint) {
    throw UnsupportedOperation(
        "tangential gradient is undefined on the two-point manifold");
  }
  const std::size_t n = grid.size();
  const double h = grid.spacing;
  const auto& v = g.values;
  std::vector<double> out(n);
  if (grid.kind == ManifoldKind::Circle) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t kp = (k + 1 == n) ? 0 : k + 1;
      const std::size_t km = (k == 0) ? n - 1 : k - 1;
      out[k] = (v[kp] - v[km]) / (2.0 * h);
    }
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      out[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
    }
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  }
  return GridFunction(g.grid, std::move(out));
}

GridFunction laplace_beltrami(const GridFunction& g) {
  check_structure(g);
  const auto& grid = *g.grid;
  const std::size_t n = grid.size();
  const double h = grid.spacing;
  const auto& v = g.values;
  std::vector<double> out(n);
  switch (grid.kind) {
    case ManifoldKind::TwoPoint:
      out[0] = v[1] - v[0];
      out[1] = v[0] - v[1];
      break;
    case ManifoldKind::Circle:
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t kp = (k + 1 == n) ? 0 : k + 1;
        const std::size_t km = (k == 0) ? n - 1 : k - 1;
        out[k] = (v[kp] - 2.0 * v[k] + v[km]) / (h * h);
      }
      break;
    case ManifoldKind::Interval:
      // Zero-flux finite-volume form; cell masses are the trapezoid weights.
      for (std::size_t k = 0; k < n; ++k) {
        const double flux_r = (k + 1 < n) ? (v[k + 1] - v[k]) / h : 0.0;
        const double flux_l = (k > 0) ? (v[k] - v[k - 1]) / h : 0.0;
        out[k] = (flux_r - flux_l) / grid.weights[k];
      }
      break;
    case ManifoldKind::SphereAxisymmetric:
      // Face coefficients sin(theta)/2 vanish at the poles, so the
      // zero-flux boundary is built in and the discrete integral of the
      // result telescopes to zero.
      for (std::size_t k = 0; k < n; ++k) {
        const double sr =
            (k + 1 < n) ? 0.5 * std::sin(static_cast<double>(k + 1) * h)
                        : 0.0;
        const double sl =
            (k > 0) ? 0.5 * std::sin(static_cast<double>(k) * h) : 0.0;
        const double flux_r = (k + 1 < n) ? sr * (v[k + 1] - v[k]) / h : 0.0;
        const double flux_l = (k > 0) ? sl * (v[k] - v[k - 1]) / h : 0.0;
        out[k] = (flux_r - flux_l) / grid.weights[k];
      }
      break;
  }
  return GridFunction(g.grid, std::move(out));
}

double l1_distance(const GridFunction& a, const GridFunction& b) {
  check_structure(a);
  check_structure(b);
  if (a.size() != b.size()) {
    throw StructuralError("L1 distance between different grid sizes");
  }
  return kernels::active_ops().weighted_abs_diff(
      a.grid->weights.data(), a.values.data(), b.values.data(), a.size());
}

}  // namespace mfg
