#pragma once

#include "osdm/types.hpp"

namespace osdm {

enum class FilterKind { Ramp, RampHann };

struct FilterSpec {
  FilterKind kind = FilterKind::Ramp;
  double cutoff = 1.0;  // fraction of Nyquist, (0,1]

  void validate() const {
    if (!(cutoff > 0.0) || cutoff > 1.0)
      throw ConfigError("filter: cutoff must be in (0,1]");
  }
};

// Filter one sinogram along the detector axis (cosine weighting plus the
// discrete band-limited ramp, applied by zero-padded FFT multiplication).
// Exposed separately for testing; fbp() composes it with back-projection.
Sinogram filter_sinogram(const Sinogram& sino, const FanBeamGeometry& geom,
                         const FilterSpec& filter);

// Fan-beam filtered back-projection for a flat equispaced detector.
ImageGrid fbp(const Sinogram& sino, const FanBeamGeometry& geom,
              const FilterSpec& filter, int width, int height,
              double pixel_size);

}  // namespace osdm
