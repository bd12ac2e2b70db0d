#pragma once

#include "osdm/types.hpp"

namespace osdm {

struct SartParams {
  int n_iters = 20;
  double relaxation = 1.0;         // (0, 2)
  int tv_steps_per_iter = 0;
  double tv_step_size = 0.0;

  void validate() const {
    if (n_iters < 1) throw ConfigError("sart: n_iters must be >= 1");
    if (!(relaxation > 0.0) || relaxation >= 2.0)
      throw ConfigError("sart: relaxation must be in (0, 2)");
    if (tv_steps_per_iter < 0) throw ConfigError("sart: tv_steps_per_iter < 0");
  }
};

// SART with full-view sweeps (row/column-sum normalized simultaneous
// update), nonnegativity clamp, and optional TV gradient-descent steps
// interleaved after each sweep. Residual history is appended per sweep
// when `residuals` is non-null.
ImageGrid sart_tv(const Sinogram& sino, const FanBeamGeometry& geom,
                  const SartParams& params, int width, int height,
                  double pixel_size, std::vector<double>* residuals = nullptr);

}  // namespace osdm
