// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after a runtime cpuid check.

#include "osdm/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace osdm::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double* x, double alpha, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sumsq_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void conv3x3_row_avx2(double* out, const double* r0, const double* r1,
                      const double* r2, const double* w, std::size_t n) {
  __m256d w0 = _mm256_set1_pd(w[0]), w1 = _mm256_set1_pd(w[1]), w2 = _mm256_set1_pd(w[2]);
  __m256d w3 = _mm256_set1_pd(w[3]), w4 = _mm256_set1_pd(w[4]), w5 = _mm256_set1_pd(w[5]);
  __m256d w6 = _mm256_set1_pd(w[6]), w7 = _mm256_set1_pd(w[7]), w8 = _mm256_set1_pd(w[8]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(out + i);
    acc = _mm256_fmadd_pd(w0, _mm256_loadu_pd(r0 + i), acc);
    acc = _mm256_fmadd_pd(w1, _mm256_loadu_pd(r0 + i + 1), acc);
    acc = _mm256_fmadd_pd(w2, _mm256_loadu_pd(r0 + i + 2), acc);
    acc = _mm256_fmadd_pd(w3, _mm256_loadu_pd(r1 + i), acc);
    acc = _mm256_fmadd_pd(w4, _mm256_loadu_pd(r1 + i + 1), acc);
    acc = _mm256_fmadd_pd(w5, _mm256_loadu_pd(r1 + i + 2), acc);
    acc = _mm256_fmadd_pd(w6, _mm256_loadu_pd(r2 + i), acc);
    acc = _mm256_fmadd_pd(w7, _mm256_loadu_pd(r2 + i + 1), acc);
    acc = _mm256_fmadd_pd(w8, _mm256_loadu_pd(r2 + i + 2), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = out[i];
    acc += w[0] * r0[i] + w[1] * r0[i + 1] + w[2] * r0[i + 2];
    acc += w[3] * r1[i] + w[4] * r1[i + 1] + w[5] * r1[i + 2];
    acc += w[6] * r2[i] + w[7] * r2[i + 1] + w[8] * r2[i + 2];
    out[i] = acc;
  }
}

void smoothsat_avx2(double* y, const double* x, std::size_t n) {
  __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d den = _mm256_sqrt_pd(_mm256_fmadd_pd(v, v, one));
    _mm256_storeu_pd(y + i, _mm256_div_pd(v, den));
  }
  for (; i < n; ++i) y[i] = x[i] / std::sqrt(1.0 + x[i] * x[i]);
}

void smoothsat_grad_avx2(double* gx, const double* gy, const double* x,
                         std::size_t n) {
  __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d u = _mm256_fmadd_pd(v, v, one);
    __m256d den = _mm256_mul_pd(u, _mm256_sqrt_pd(u));
    __m256d g = _mm256_div_pd(_mm256_loadu_pd(gy + i), den);
    _mm256_storeu_pd(gx + i, _mm256_add_pd(_mm256_loadu_pd(gx + i), g));
  }
  for (; i < n; ++i) {
    double u = 1.0 + x[i] * x[i];
    gx[i] += gy[i] / (u * std::sqrt(u));
  }
}

}  // namespace

extern const Kernels avx2_kernels;
const Kernels avx2_kernels = {
    dot_avx2,      axpy_avx2,      scale_avx2,
    sum_avx2,      sumsq_avx2,     conv3x3_row_avx2,
    smoothsat_avx2, smoothsat_grad_avx2,
};

}  // namespace osdm::simd

#endif  // x86-64
