#pragma once

#include <cstdint>
#include <vector>

#include "osdm/types.hpp"

namespace osdm {

// Transmission photon model: measured counts per ray follow
// Poisson(a * exp(-x/eta) + r) for a sinogram x stored in eta-calibrated
// units.
struct PhotonModel {
  double source_intensity = 1e5;  // photons per ray (I0)
  double background = 0.0;        // photons (r)
  double eta = 22000.0;           // calibration scale
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(eta > 0.0)) throw ConfigError("photon model: eta must be > 0");
    if (background < 0.0 || source_intensity <= background)
      throw ConfigError("photon model: need a > r >= 0");
  }
};

// One photon per ray guards the log against starved measurements.
inline constexpr double kCountFloor = 1.0;

// Independent Poisson draws, one per ray; reproducible from rng_seed and
// independent of evaluation order.
std::vector<double> simulate_counts(const Sinogram& x, const PhotonModel& model);

// y_i = eta * ln(a / max(L_i - r, floor)); inverse of the mean model for
// noiseless counts.
Sinogram log_transform(const std::vector<double>& counts, int n_views,
                       int n_detectors, const PhotonModel& model,
                       double scale = 1.0);

// PWLS statistical weights w_i = I0 * exp(-y_i/eta).
std::vector<double> pwls_weights(const Sinogram& y, const PhotonModel& model);

}  // namespace osdm
