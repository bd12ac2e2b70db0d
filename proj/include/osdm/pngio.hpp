#pragma once

#include <string>
#include <vector>

namespace osdm {

// 8-bit grayscale PNG with a linear [lo,hi] -> [0,255] window (values are
// clamped). Row-major input, rows written top to bottom.
void write_png_gray(const std::string& path, const std::vector<double>& values,
                    int rows, int cols, double lo, double hi);

// Attenuation (1/cm) to Hounsfield units.
inline double attenuation_to_hu(double mu, double mu_water) {
  return 1000.0 * (mu - mu_water) / mu_water;
}

}  // namespace osdm
