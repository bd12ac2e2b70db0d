#include "osdm/phantom.hpp"

#include <cmath>

namespace osdm {

bool inside_ellipse(const Ellipse& e, double x, double y) {
  double px = x - e.cx, py = y - e.cy;
  double ca = std::cos(e.angle), sa = std::sin(e.angle);
  double u = ca * px + sa * py;
  double v = -sa * px + ca * py;
  double q = (u * u) / (e.rx * e.rx) + (v * v) / (e.ry * e.ry);
  return q <= 1.0;
}

ImageGrid make_phantom(const EllipsePhantom& spec, int width, int height,
                       double pixel_size) {
  for (const auto& e : spec)
    if (e.rx <= 0.0 || e.ry <= 0.0)
      throw ConfigError("phantom: semi-axes must be positive");
  ImageGrid img(width, height, pixel_size);
  for (int r = 0; r < height; ++r) {
    double y = (r - 0.5 * (height - 1)) * pixel_size;
    for (int c = 0; c < width; ++c) {
      double x = (c - 0.5 * (width - 1)) * pixel_size;
      double acc = 0.0;
      for (const auto& e : spec)
        if (inside_ellipse(e, x, y)) acc += e.value;
      img.at(r, c) = acc;
    }
  }
  return img;
}

EllipsePhantom head_phantom(double R, double mu_water) {
  // Classic head-phantom layout (unit disc coordinates), contrasts remapped
  // so the interior sits near mu_water with soft lesions around it.
  EllipsePhantom p;
  auto add = [&](double cx, double cy, double rx, double ry, double deg,
                 double v) {
    p.push_back({cx * R, cy * R, rx * R, ry * R, deg * M_PI / 180.0,
                 v * mu_water});
  };
  add(0.0, 0.0, 0.92, 0.69, 90.0, 2.0);       // skull
  add(0.0, -0.0184, 0.874, 0.6624, 90.0, -0.98);  // brain
  add(0.22, 0.0, 0.31, 0.11, 72.0, -0.2);
  add(-0.22, 0.0, 0.41, 0.16, 108.0, -0.2);
  add(0.0, 0.35, 0.25, 0.21, 90.0, 0.1);
  add(0.0, 0.1, 0.046, 0.046, 0.0, 0.15);
  add(0.0, -0.1, 0.046, 0.046, 0.0, 0.15);
  add(-0.08, -0.605, 0.046, 0.023, 0.0, 0.1);
  add(0.0, -0.605, 0.023, 0.023, 0.0, 0.1);
  add(0.06, -0.605, 0.023, 0.046, 90.0, 0.1);
  return p;
}

}  // namespace osdm
