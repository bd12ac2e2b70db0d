#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the convolution network, the samplers
// and the projection filters. Scalar reference kernels always exist; an
// AVX2/FMA (x86-64) or NEON (aarch64) variant is selected once at startup.
// Variants may reassociate sums, so results can differ from the scalar
// path at rounding level; equivalence is tested to tight relative bounds.

namespace osdm::simd {

struct Kernels {
  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha*x[i]
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double* x, double alpha, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*sumsq)(const double* x, std::size_t n);
  // out[i] += sum_{k<3,j<3} w[3k+j] * row_k[i+j]; rows come from a
  // zero-padded buffer so i+j never leaves valid storage.
  void (*conv3x3_row)(double* out, const double* r0, const double* r1,
                      const double* r2, const double* w, std::size_t n);
  // y[i] = x[i]/sqrt(1+x[i]^2)
  void (*smoothsat)(double* y, const double* x, std::size_t n);
  // gx[i] += gy[i]*(1+x[i]^2)^{-3/2}
  void (*smoothsat_grad)(double* gx, const double* gy, const double* x,
                         std::size_t n);
};

// Scalar reference implementations (always available).
extern const Kernels scalar_kernels;

// Best kernels for the running CPU. Resolved once, thread-safe.
const Kernels& active();

// Name of the active variant: "scalar", "avx2" or "neon".
std::string_view active_name();

// Convenience forwarders.
inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double* y, double alpha, const double* x, std::size_t n) {
  active().axpy(y, alpha, x, n);
}
inline void scale(double* x, double alpha, std::size_t n) {
  active().scale(x, alpha, n);
}
inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline double sumsq(const double* x, std::size_t n) {
  return active().sumsq(x, n);
}
inline void conv3x3_row(double* out, const double* r0, const double* r1,
                        const double* r2, const double* w, std::size_t n) {
  active().conv3x3_row(out, r0, r1, r2, w, n);
}
inline void smoothsat(double* y, const double* x, std::size_t n) {
  active().smoothsat(y, x, n);
}
inline void smoothsat_grad(double* gx, const double* gy, const double* x,
                           std::size_t n) {
  active().smoothsat_grad(gx, gy, x, n);
}

}  // namespace osdm::simd
