// NEON kernel variants for aarch64 (float64x2).

#include "osdm/simd.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

namespace osdm::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double* y, double alpha, const double* x, std::size_t n) {
  float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double* x, double alpha, std::size_t n) {
  float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sumsq_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void conv3x3_row_neon(double* out, const double* r0, const double* r1,
                      const double* r2, const double* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vld1q_f64(out + i);
    acc = vfmaq_f64(acc, vdupq_n_f64(w[0]), vld1q_f64(r0 + i));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[1]), vld1q_f64(r0 + i + 1));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[2]), vld1q_f64(r0 + i + 2));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[3]), vld1q_f64(r1 + i));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[4]), vld1q_f64(r1 + i + 1));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[5]), vld1q_f64(r1 + i + 2));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[6]), vld1q_f64(r2 + i));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[7]), vld1q_f64(r2 + i + 1));
    acc = vfmaq_f64(acc, vdupq_n_f64(w[8]), vld1q_f64(r2 + i + 2));
    vst1q_f64(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = out[i];
    acc += w[0] * r0[i] + w[1] * r0[i + 1] + w[2] * r0[i + 2];
    acc += w[3] * r1[i] + w[4] * r1[i + 1] + w[5] * r1[i + 2];
    acc += w[6] * r2[i] + w[7] * r2[i + 1] + w[8] * r2[i + 2];
    out[i] = acc;
  }
}

void smoothsat_neon(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    y[i] = x[i] / std::sqrt(1.0 + x[i] * x[i]);
}

void smoothsat_grad_neon(double* gx, const double* gy, const double* x,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double u = 1.0 + x[i] * x[i];
    gx[i] += gy[i] / (u * std::sqrt(u));
  }
}

}  // namespace

extern const Kernels neon_kernels;
const Kernels neon_kernels = {
    dot_neon,      axpy_neon,      scale_neon,
    sum_neon,      sumsq_neon,     conv3x3_row_neon,
    smoothsat_neon, smoothsat_grad_neon,
};

}  // namespace osdm::simd

#endif  // aarch64
