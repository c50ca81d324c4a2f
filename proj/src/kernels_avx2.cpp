#include <cstddef>

#include "mfglab/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace mfg::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc);
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += a[k] * b[k];
  return hsum(acc) + tail;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + k));
  double tail = 0.0;
  for (; k < n; ++k) tail += a[k];
  return hsum(acc) + tail;
}

void axpby_avx2(double a, const double* x, double b, double* y,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + k));
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), vy);
    _mm256_storeu_pd(y + k, vy);
  }
  for (; k < n; ++k) y[k] = a * x[k] + b * y[k];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(x + k, _mm256_mul_pd(va, _mm256_loadu_pd(x + k)));
  }
  for (; k < n; ++k) x[k] *= a;
}

double weighted_abs_diff_avx2(const double* w, const double* a,
                              const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    diff = _mm256_andnot_pd(sign_mask, diff);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), diff, acc);
  }
  double tail = 0.0;
  for (; k < n; ++k) tail += w[k] * std::fabs(a[k] - b[k]);
  return hsum(acc) + tail;
}

void upwind_combine_avx2(double* out, const double* left, const double* mid,
                         const double* right, const double* vp,
                         const double* vm, double lam, std::size_t n) {
  const __m256d vlam = _mm256_set1_pd(lam);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d m = _mm256_loadu_pd(mid + k);
    const __m256d dl = _mm256_sub_pd(m, _mm256_loadu_pd(left + k));
    const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(right + k), m);
    __m256d flux = _mm256_mul_pd(_mm256_loadu_pd(vp + k), dl);
    flux = _mm256_fmadd_pd(_mm256_loadu_pd(vm + k), dr, flux);
    _mm256_storeu_pd(out + k, _mm256_fnmadd_pd(vlam, flux, m));
  }
  for (; k < n; ++k) {
    out[k] = mid[k] - lam * (vp[k] * (mid[k] - left[k]) +
                             vm[k] * (right[k] - mid[k]));
  }
}

void heun_circle_avx2(double* y1, double* y2, const double* xi1,
                      const double* xi2, double gx_dt, double gy_dt,
                      double sigma, std::size_t n) {
  const __m256d vgx = _mm256_set1_pd(gx_dt);
  const __m256d vgy = _mm256_set1_pd(gy_dt);
  const __m256d vs = _mm256_set1_pd(sigma);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d gx = _mm256_fmadd_pd(vs, _mm256_loadu_pd(xi1 + k), vgx);
    const __m256d gy = _mm256_fmadd_pd(vs, _mm256_loadu_pd(xi2 + k), vgy);
    const __m256d ax = _mm256_loadu_pd(y1 + k);
    const __m256d ay = _mm256_loadu_pd(y2 + k);
    const __m256d d1 =
        _mm256_fmadd_pd(gx, ax, _mm256_mul_pd(gy, ay));
    const __m256d k1x = _mm256_fnmadd_pd(d1, ax, gx);
    const __m256d k1y = _mm256_fnmadd_pd(d1, ay, gy);
    __m256d px = _mm256_add_pd(ax, k1x);
    __m256d py = _mm256_add_pd(ay, k1y);
    __m256d inv = _mm256_div_pd(
        one, _mm256_sqrt_pd(
                 _mm256_fmadd_pd(px, px, _mm256_mul_pd(py, py))));
    px = _mm256_mul_pd(px, inv);
    py = _mm256_mul_pd(py, inv);
    const __m256d d2 =
        _mm256_fmadd_pd(gx, px, _mm256_mul_pd(gy, py));
    const __m256d k2x = _mm256_fnmadd_pd(d2, px, gx);
    const __m256d k2y = _mm256_fnmadd_pd(d2, py, gy);
    __m256d nx =
        _mm256_fmadd_pd(half, _mm256_add_pd(k1x, k2x), ax);
    __m256d ny =
        _mm256_fmadd_pd(half, _mm256_add_pd(k1y, k2y), ay);
    inv = _mm256_div_pd(
        one, _mm256_sqrt_pd(
                 _mm256_fmadd_pd(nx, nx, _mm256_mul_pd(ny, ny))));
    _mm256_storeu_pd(y1 + k, _mm256_mul_pd(nx, inv));
    _mm256_storeu_pd(y2 + k, _mm256_mul_pd(ny, inv));
  }
  if (k < n) {
    scalar_ops().heun_circle(y1 + k, y2 + k, xi1 + k, xi2 + k, gx_dt, gy_dt,
                             sigma, n - k);
  }
}

}  // namespace

const Ops* avx2_ops() {
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  static const Ops ops{dot_avx2,
                       sum_avx2,
                       axpby_avx2,
                       scale_avx2,
                       weighted_abs_diff_avx2,
                       upwind_combine_avx2,
                       heun_circle_avx2,
                       "avx2"};
  return &ops;
}

}  // namespace mfg::kernels

#else

namespace mfg::kernels {

const Ops* avx2_ops() { return nullptr; }

}  // namespace mfg::kernels

#endif
