#include "osdm/fbp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace osdm {

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Sinogram filter_sinogram(const Sinogram& sino, const FanBeamGeometry& geom,
                         const FilterSpec& filter) {
  geom.validate();
  filter.validate();
  if (sino.n_views != geom.n_views || sino.n_detectors != geom.n_detectors)
    throw ConfigError("filter_sinogram: shape mismatch");

  const int nd = geom.n_detectors;
  const double D = geom.source_to_center;
  // Detector rebinned to the virtual line through the isocenter.
  const double mag = D / (D + geom.detector_to_center);
  const double ds = geom.detector_spacing() * mag;
  const std::size_t L = next_pow2(2 * std::size_t(nd));
  const std::size_t Lc = L / 2 + 1;

  // Band-limited discrete ramp kernel, circularly embedded.
  std::vector<double> h(L, 0.0);
  h[0] = 1.0 / (4.0 * ds * ds);
  for (std::size_t n = 1; n < L / 2; n += 2) {
    double v = -1.0 / (M_PI * M_PI * double(n) * double(n) * ds * ds);
    h[n] = v;
    h[L - n] = v;
  }

  double* buf = fftw_alloc_real(L);
  fftw_complex* spec = fftw_alloc_complex(Lc);
  fftw_plan fwd = fftw_plan_dft_r2c_1d(int(L), buf, spec, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_1d(int(L), spec, buf, FFTW_ESTIMATE);

  std::copy(h.begin(), h.end(), buf);
  fftw_execute(fwd);
  std::vector<double> response(Lc);
  for (std::size_t k = 0; k < Lc; ++k) {
    double r = spec[k][0];  // kernel is even, imaginary part is noise
    double f = double(k) / double(L);  // cycles/sample, Nyquist = 0.5
    double fc = 0.5 * filter.cutoff;
    if (f > fc) {
      r = 0.0;
    } else if (filter.kind == FilterKind::RampHann) {
      r *= 0.5 * (1.0 + std::cos(M_PI * f / fc));
    }
    response[k] = r;
  }

  Sinogram out(sino.n_views, sino.n_detectors, sino.scale);
  for (int v = 0; v < sino.n_views; ++v) {
    for (int d = 0; d < nd; ++d) {
      double s = geom.detector_offset(d) * mag;
      buf[d] = sino.at(v, d) * D / std::sqrt(D * D + s * s);
    }
    std::fill(buf + nd, buf + L, 0.0);
    fftw_execute(fwd);
    for (std::size_t k = 0; k < Lc; ++k) {
      spec[k][0] *= response[k];
      spec[k][1] *= response[k];
    }
    fftw_execute(bwd);
    double norm = ds / double(L);  // convolution sample spacing + FFT scale
    for (int d = 0; d < nd; ++d) out.at(v, d) = buf[d] * norm;
  }

  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);
  fftw_free(spec);
  return out;
}

ImageGrid fbp(const Sinogram& sino, const FanBeamGeometry& geom,
              const FilterSpec& filter, int width, int height,
              double pixel_size) {
  Sinogram q = filter_sinogram(sino, geom, filter);

  const double D = geom.source_to_center;
  const double mag = D / (D + geom.detector_to_center);
  const double ds = geom.detector_spacing() * mag;
  const double s0 = geom.detector_offset(0) * mag;
  const int nd = geom.n_detectors;
  const double dbeta = geom.angle_span / geom.n_views;
  // Full-circle fan coverage measures each line twice.
  const double half = (geom.angle_span > M_PI + 1e-9) ? 0.5 : 1.0;

  ImageGrid img(width, height, pixel_size);
  std::vector<double> cb(geom.n_views), sb(geom.n_views);
  for (int v = 0; v < geom.n_views; ++v) {
    double beta = geom.view_angle(v);
    cb[v] = std::cos(beta);
    sb[v] = std::sin(beta);
  }

  for (int r = 0; r < height; ++r) {
    double py = (r - 0.5 * (height - 1)) * pixel_size;
    for (int c = 0; c < width; ++c) {
      double px = (c - 0.5 * (width - 1)) * pixel_size;
      double acc = 0.0;
      for (int v = 0; v < geom.n_views; ++v) {
        double along = D - (px * cb[v] + py * sb[v]);
        if (along < 1e-9) continue;
        double s = (-px * sb[v] + py * cb[v]) * D / along;
        double u = (s - s0) / ds;
        int i0 = int(std::floor(u));
        if (i0 < 0 || i0 >= nd - 1) continue;
        double w = u - i0;
        double qv = (1.0 - w) * q.at(v, i0) + w * q.at(v, i0 + 1);
        acc += qv * (D * D) / (along * along);
      }
      img.at(r, c) = acc * dbeta * half;
    }
  }
  return img;
}

}  // namespace osdm
