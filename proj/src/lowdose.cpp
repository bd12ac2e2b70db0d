#include "osdm/lowdose.hpp"

#include <cmath>

#include "osdm/rng.hpp"

namespace osdm {

std::vector<double> simulate_counts(const Sinogram& x, const PhotonModel& model) {
  model.validate();
  std::vector<double> counts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double xi = x.values[i];
    if (!std::isfinite(xi))
      throw NumericalError("simulate_counts: non-finite sinogram value");
    double mean = model.source_intensity * std::exp(-xi / model.eta) +
                  model.background;
    Rng rng = Rng::derive(model.rng_seed, i);
    counts[i] = double(rng.poisson(mean));
  }
  return counts;
}

Sinogram log_transform(const std::vector<double>& counts, int n_views,
                       int n_detectors, const PhotonModel& model,
                       double scale) {
  model.validate();
  if (counts.size() != std::size_t(n_views) * n_detectors)
    throw ConfigError("log_transform: counts size mismatch");
  Sinogram y(n_views, n_detectors, scale);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double net = std::max(counts[i] - model.background, kCountFloor);
    y.values[i] = model.eta * std::log(model.source_intensity / net);
  }
  return y;
}

std::vector<double> pwls_weights(const Sinogram& y, const PhotonModel& model) {
  model.validate();
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y.values[i]))
      throw NumericalError("pwls_weights: non-finite sinogram value");
    w[i] = model.source_intensity * std::exp(-y.values[i] / model.eta);
  }
  return w;
}

}  // namespace osdm
