#pragma once

#include <cstddef>

// Low-level array kernels used by the solvers' hot loops. A scalar
// reference implementation always exists; an AVX2 variant is selected at
// runtime when the CPU supports it. The environment variable
// MFGLAB_KERNELS={scalar,avx2} overrides the automatic choice.

namespace mfg::kernels {

struct Ops {
  // sum_k a[k]*b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_k a[k]
  double (*sum)(const double* a, std::size_t n);
  // y[k] <- a*x[k] + b*y[k]
  void (*axpby)(double a, const double* x, double b, double* y,
                std::size_t n);
  // x[k] <- a*x[k]
  void (*scale)(double a, double* x, std::size_t n);
  // sum_k w[k]*|a[k]-b[k]|
  double (*weighted_abs_diff)(const double* w, const double* a,
                              const double* b, std::size_t n);
  // out[k] <- mid[k] - lam*(vp[k]*(mid[k]-left[k]) + vm[k]*(right[k]-mid[k]))
  // One upwind transport update; vp/vm carry the positive/negative parts
  // of the per-node velocity.
  void (*upwind_combine)(double* out, const double* left, const double* mid,
                         const double* right, const double* vp,
                         const double* vm, double lam, std::size_t n);
  // One projected Euler-Heun step on the unit circle for n agents with a
  // shared drift vector (gx, gy)*dt and per-agent noise increments
  // sigma*(xi1[k], xi2[k]). Positions (y1, y2) are updated in place and
  // renormalized.
  void (*heun_circle)(double* y1, double* y2, const double* xi1,
                      const double* xi2, double gx_dt, double gy_dt,
                      double sigma, std::size_t n);
  const char* name;
};

const Ops& scalar_ops();

// Null when the CPU (or build) lacks AVX2.
const Ops* avx2_ops();

// Backend picked once per process: AVX2 when available unless overridden.
// Throws mfg::ConfigError if MFGLAB_KERNELS names an unavailable backend.
const Ops& active_ops();

}  // namespace mfg::kernels
