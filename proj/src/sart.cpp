#include "osdm/sart.hpp"

#include <algorithm>
#include <cmath>

#include "osdm/projector.hpp"
#include "osdm/simd.hpp"
#include "osdm/tv.hpp"

namespace osdm {

ImageGrid sart_tv(const Sinogram& sino, const FanBeamGeometry& geom,
                  const SartParams& params, int width, int height,
                  double pixel_size, std::vector<double>* residuals) {
  params.validate();
  if (sino.n_views != geom.n_views || sino.n_detectors != geom.n_detectors)
    throw ConfigError("sart_tv: sinogram shape does not match geometry");

  ImageGrid ones(width, height, pixel_size);
  std::fill(ones.values.begin(), ones.values.end(), 1.0);
  Sinogram row_sums = forward_project(ones, geom);
  Sinogram ones_sino(geom.n_views, geom.n_detectors);
  std::fill(ones_sino.values.begin(), ones_sino.values.end(), 1.0);
  ImageGrid col_sums = back_project(ones_sino, geom, width, height, pixel_size);

  const double tiny = 1e-12;
  ImageGrid x(width, height, pixel_size);

  for (int it = 0; it < params.n_iters; ++it) {
    Sinogram proj = forward_project(x, geom);
    Sinogram resid(geom.n_views, geom.n_detectors);
    for (std::size_t i = 0; i < resid.size(); ++i) {
      double rs = row_sums.values[i];
      resid.values[i] =
          (rs > tiny) ? (sino.values[i] - proj.values[i]) / rs : 0.0;
    }
    if (residuals) {
      double r2 = 0.0;
      for (std::size_t i = 0; i < proj.size(); ++i) {
        double d = proj.values[i] - sino.values[i];
        r2 += d * d;
      }
      residuals->push_back(std::sqrt(r2));
    }
    ImageGrid corr = back_project(resid, geom, width, height, pixel_size);
    for (std::size_t i = 0; i < x.size(); ++i) {
      double cs = col_sums.values[i];
      if (cs > tiny)
        x.values[i] += params.relaxation * corr.values[i] / cs;
      x.values[i] = std::max(x.values[i], 0.0);
    }
    for (int t = 0; t < params.tv_steps_per_iter; ++t) {
      auto g = tv_gradient(x.values, height, width);
      simd::axpy(x.values.data(), -params.tv_step_size, g.data(), x.size());
      for (auto& v : x.values) v = std::max(v, 0.0);
    }
  }
  return x;
}

}  // namespace osdm
