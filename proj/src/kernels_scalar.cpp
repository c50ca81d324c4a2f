#include <cmath>
#include <cstddef>

#include "mfglab/kernels.hpp"

namespace mfg::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k];
  return acc;
}

void axpby_scalar(double a, const double* x, double b, double* y,
                  std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] = a * x[k] + b * y[k];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) x[k] *= a;
}

double weighted_abs_diff_scalar(const double* w, const double* a,
                                const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += w[k] * std::fabs(a[k] - b[k]);
  return acc;
}

void upwind_combine_scalar(double* out, const double* left, const double* mid,
                           const double* right, const double* vp,
                           const double* vm, double lam, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = mid[k] - lam * (vp[k] * (mid[k] - left[k]) +
                             vm[k] * (right[k] - mid[k]));
  }
}

void heun_circle_scalar(double* y1, double* y2, const double* xi1,
                        const double* xi2, double gx_dt, double gy_dt,
                        double sigma, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double gx = gx_dt + sigma * xi1[k];
    const double gy = gy_dt + sigma * xi2[k];
    const double ax = y1[k];
    const double ay = y2[k];
    const double d1 = gx * ax + gy * ay;
    const double k1x = gx - d1 * ax;
    const double k1y = gy - d1 * ay;
    double px = ax + k1x;
    double py = ay + k1y;
    double inv = 1.0 / std::sqrt(px * px + py * py);
    px *= inv;
    py *= inv;
    const double d2 = gx * px + gy * py;
    const double k2x = gx - d2 * px;
    const double k2y = gy - d2 * py;
    double nx = ax + 0.5 * (k1x + k2x);
    double ny = ay + 0.5 * (k1y + k2y);
    inv = 1.0 / std::sqrt(nx * nx + ny * ny);
    y1[k] = nx * inv;
    y2[k] = ny * inv;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{dot_scalar,
                       sum_scalar,
                       axpby_scalar,
                       scale_scalar,
                       weighted_abs_diff_scalar,
                       upwind_combine_scalar,
                       heun_circle_scalar,
                       "scalar"};
  return ops;
}

}  // namespace mfg::kernels
