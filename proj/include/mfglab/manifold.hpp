#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

// Discretizations of the decision space Y: quadrature, tangential calculus,
// and boundary handling for the circle, the two-point set {-1,+1}, the
// axisymmetric reduction of the 2-sphere, and a closed interval with
// zero-flux boundary. Circle/sphere/two-point measures are normalized to
// total mass 1; the interval carries plain Lebesgue measure.

namespace mfg {

enum class ManifoldKind { Circle, TwoPoint, SphereAxisymmetric, Interval };

struct ManifoldGrid {
  ManifoldKind kind;
  std::vector<double> nodes;
  /// Quadrature weights (cell masses in the manifold's measure).
  std::vector<double> weights;
  /// Grid step between adjacent nodes (2 for TwoPoint).
  double spacing;
  /// Interval bounds; zero for the other kinds.
  double lower = 0.0;
  double upper = 0.0;

  std::size_t size() const { return nodes.size(); }
  bool periodic() const { return kind == ManifoldKind::Circle; }
};

using GridPtr = std::shared_ptr<const ManifoldGrid>;

/// Uniform angles theta_k = 2*pi*k/n, weights 1/n (normalized measure).
GridPtr circle_grid(std::size_t n_nodes);

/// The two atoms {-1, +1} with weights 1/2 each.
GridPtr two_point_grid();

/// Cell-centered polar angles theta_k = (k+1/2)*h on [0, pi], h = pi/n.
/// Weights are exact cell masses of the normalized surface measure,
/// w_k = (cos(k*h) - cos((k+1)*h))/2, so they sum to 1 exactly.
GridPtr sphere_axisymmetric_grid(std::size_t n_nodes);

/// Node-centered grid on [lower, upper] including both endpoints, with
/// trapezoidal weights (Lebesgue measure).
GridPtr interval_grid(double lower, double upper, std::size_t n_nodes);

struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(GridPtr g, std::vector<double> v);
  /// Constant field.
  GridFunction(GridPtr g, double constant);

  std::size_t size() const { return values.size(); }
};

/// Quadrature: sum_k weights_k * values_k.
double integrate(const GridFunction& g);

/// Integral of y*g(y) as a 2-vector in the ambient plane. For TwoPoint,
/// Interval and SphereAxisymmetric the mean is the scalar/axial component
/// in [0]; [1] is zero.
std::array<double, 2> mean_decision_vector(const GridFunction& g);

/// Centered second-order differences; periodic wrap on the circle,
/// one-sided second-order stencils at interval/sphere endpoints.
/// Undefined (error) for TwoPoint.
GridFunction tangential_gradient(const GridFunction& g);

/// Divergence-form Laplacian: 3-point stencil on Circle, zero-flux
/// finite-volume form on Interval, sin(theta)-weighted divergence on
/// SphereAxisymmetric (pole fluxes vanish), symmetric flip generator
/// g(-y) - g(y) on TwoPoint.
GridFunction laplace_beltrami(const GridFunction& g);

/// L1 distance in the grid's measure: sum_k w_k |a_k - b_k|.
double l1_distance(const GridFunction& a, const GridFunction& b);

/// Throws StructuralError unless g has a grid and matching lengths.
void check_structure(const GridFunction& g);

}  // namespace mfg
