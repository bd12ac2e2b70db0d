#include "osdm/simd.hpp"

#include <cmath>

namespace osdm::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sumsq_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void conv3x3_row_scalar(double* out, const double* r0, const double* r1,
                        const double* r2, const double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = out[i];
    acc += w[0] * r0[i] + w[1] * r0[i + 1] + w[2] * r0[i + 2];
    acc += w[3] * r1[i] + w[4] * r1[i + 1] + w[5] * r1[i + 2];
    acc += w[6] * r2[i] + w[7] * r2[i + 1] + w[8] * r2[i + 2];
    out[i] = acc;
  }
}

void smoothsat_scalar(double* y, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] / std::sqrt(1.0 + x[i] * x[i]);
}

void smoothsat_grad_scalar(double* gx, const double* gy, const double* x,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double u = 1.0 + x[i] * x[i];
    gx[i] += gy[i] / (u * std::sqrt(u));
  }
}

}  // namespace

const Kernels scalar_kernels = {
    dot_scalar,     axpy_scalar,      scale_scalar,
    sum_scalar,     sumsq_scalar,     conv3x3_row_scalar,
    smoothsat_scalar, smoothsat_grad_scalar,
};

}  // namespace osdm::simd
