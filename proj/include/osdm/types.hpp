#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace osdm {

// Thrown by CLI argument/config validation; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iteration diverges or data is non-finite; exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 2D attenuation map, row-major. Pixel (r,c) has its center at
// x = (c - (w-1)/2)*pixel_size, y = (r - (h-1)/2)*pixel_size, so the grid
// is centered on the rotation axis.
struct ImageGrid {
  int width = 0;
  int height = 0;
  double pixel_size = 0.0;  // cm
  std::vector<double> values;  // 1/cm

  ImageGrid() = default;
  ImageGrid(int w, int h, double ps)
      : width(w), height(h), pixel_size(ps), values(std::size_t(w) * h, 0.0) {
    if (w < 1 || h < 1 || ps <= 0.0)
      throw ConfigError("ImageGrid: invalid dimensions");
  }

  double& at(int r, int c) { return values[std::size_t(r) * width + c]; }
  double at(int r, int c) const { return values[std::size_t(r) * width + c]; }
  std::size_t size() const { return values.size(); }
};

struct FanBeamGeometry {
  double source_to_center = 40.0;    // cm
  double detector_to_center = 40.0;  // cm
  double detector_width = 41.3;      // cm, full physical width
  int n_detectors = 180;
  int n_views = 180;
  double angle_start = 0.0;               // rad
  double angle_span = 2.0 * M_PI;         // rad, (0, 2pi]

  void validate() const {
    if (source_to_center <= 0 || detector_to_center <= 0 || detector_width <= 0)
      throw ConfigError("geometry: lengths must be positive");
    if (n_detectors < 1 || n_views < 1)
      throw ConfigError("geometry: counts must be >= 1");
    if (!(angle_span > 0) || angle_span > 2.0 * M_PI + 1e-12)
      throw ConfigError("geometry: angle_span must be in (0, 2pi]");
  }

  double view_angle(int v) const {
    return angle_start + angle_span * double(v) / double(n_views);
  }
  double detector_spacing() const { return detector_width / n_detectors; }
  // Signed offset of element d along the detector axis, element centers.
  double detector_offset(int d) const {
    return (double(d) - 0.5 * (n_detectors - 1)) * detector_spacing();
  }
};

// Views x detectors array of line integrals; `scale` is the calibration
// factor applied to raw attenuation-length values when the sinogram was
// written in eta-calibrated units (1.0 for raw projections).
struct Sinogram {
  int n_views = 0;
  int n_detectors = 0;
  double scale = 1.0;
  std::vector<double> values;  // row-major by view

  Sinogram() = default;
  Sinogram(int v, int d, double s = 1.0)
      : n_views(v), n_detectors(d), scale(s),
        values(std::size_t(v) * d, 0.0) {}

  double& at(int v, int d) { return values[std::size_t(v) * n_detectors + d]; }
  double at(int v, int d) const {
    return values[std::size_t(v) * n_detectors + d];
  }
  std::size_t size() const { return values.size(); }
};

struct Ray {
  double ox = 0.0, oy = 0.0;  // origin, cm
  double dx = 0.0, dy = 0.0;  // unit direction

  static Ray through(double ax, double ay, double bx, double by) {
    double vx = bx - ax, vy = by - ay;
    double len = std::hypot(vx, vy);
    if (len == 0.0) throw ConfigError("Ray: coincident endpoints");
    return {ax, ay, vx / len, vy / len};
  }
};

struct Ellipse {
  double cx = 0.0, cy = 0.0;      // center, cm
  double rx = 1.0, ry = 1.0;      // semi-axes, cm
  double angle = 0.0;             // rotation, rad
  double value = 0.0;             // additive attenuation, 1/cm
};

using EllipsePhantom = std::vector<Ellipse>;

}  // namespace osdm
