#include "osdm/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace osdm {

namespace {

// Clip the ray's parameter interval to the grid bounding box. Returns
// false when the intersection is empty (or degenerate).
bool clip_to_box(const Ray& ray, double xmin, double xmax, double ymin,
                 double ymax, double& t0, double& t1) {
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  const double o[2] = {ray.ox, ray.oy};
  const double d[2] = {ray.dx, ray.dy};
  const double lo[2] = {xmin, ymin};
  const double hi[2] = {xmax, ymax};
  for (int ax = 0; ax < 2; ++ax) {
    if (d[ax] == 0.0) {
      if (o[ax] < lo[ax] || o[ax] > hi[ax]) return false;
      continue;
    }
    double ta = (lo[ax] - o[ax]) / d[ax];
    double tb = (hi[ax] - o[ax]) / d[ax];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t1 > t0 + 1e-14;
}

}  // namespace

void siddon_visit(const Ray& ray, int width, int height, double pixel_size,
                  const std::function<void(std::size_t, double)>& visit) {
  const double ps = pixel_size;
  const double xmin = -0.5 * width * ps, xmax = 0.5 * width * ps;
  const double ymin = -0.5 * height * ps, ymax = 0.5 * height * ps;

  double t0, t1;
  if (!clip_to_box(ray, xmin, xmax, ymin, ymax, t0, t1)) return;
  t0 = std::max(t0, 0.0);  // directional: nothing behind the origin
  if (t1 <= t0 + 1e-14) return;

  // March cell by cell between successive axis crossings; each segment's
  // midpoint identifies the pixel it lies in.
  double t = t0;
  while (t < t1 - 1e-14) {
    double tx = std::numeric_limits<double>::infinity();
    double ty = std::numeric_limits<double>::infinity();
    double x = ray.ox + t * ray.dx;
    double y = ray.oy + t * ray.dy;
    if (ray.dx > 0.0) {
      double edge = xmin + (std::floor((x - xmin) / ps) + 1.0) * ps;
      tx = (edge - ray.ox) / ray.dx;
    } else if (ray.dx < 0.0) {
      double edge = xmin + std::ceil((x - xmin) / ps - 1.0) * ps;
      tx = (edge - ray.ox) / ray.dx;
    }
    if (ray.dy > 0.0) {
      double edge = ymin + (std::floor((y - ymin) / ps) + 1.0) * ps;
      ty = (edge - ray.oy) / ray.dy;
    } else if (ray.dy < 0.0) {
      double edge = ymin + std::ceil((y - ymin) / ps - 1.0) * ps;
      ty = (edge - ray.oy) / ray.dy;
    }
    double tn = std::min({tx, ty, t1});
    if (tn <= t + 1e-14) {  // numerical stall at a corner; nudge forward
      tn = t + 1e-14;
      t = tn;
      continue;
    }
    double tm = 0.5 * (t + tn);
    int c = int(std::floor((ray.ox + tm * ray.dx - xmin) / ps));
    int r = int(std::floor((ray.oy + tm * ray.dy - ymin) / ps));
    if (c >= 0 && c < width && r >= 0 && r < height)
      visit(std::size_t(r) * width + c, tn - t);
    t = tn;
  }
}

double siddon_line_integral(const Ray& ray, const ImageGrid& grid) {
  double acc = 0.0;
  siddon_visit(ray, grid.width, grid.height, grid.pixel_size,
               [&](std::size_t idx, double len) { acc += grid.values[idx] * len; });
  return acc;
}

void ray_endpoints(const FanBeamGeometry& geom, int view, int det, double& sx,
                   double& sy, double& dx, double& dy) {
  double beta = geom.view_angle(view);
  double cb = std::cos(beta), sb = std::sin(beta);
  sx = geom.source_to_center * cb;
  sy = geom.source_to_center * sb;
  double off = geom.detector_offset(det);
  // Detector line sits opposite the source; its axis is (-sin b, cos b).
  dx = -geom.detector_to_center * cb - off * sb;
  dy = -geom.detector_to_center * sb + off * cb;
}

Sinogram forward_project(const ImageGrid& image, const FanBeamGeometry& geom) {
  geom.validate();
  Sinogram sino(geom.n_views, geom.n_detectors);
  for (int v = 0; v < geom.n_views; ++v) {
    for (int d = 0; d < geom.n_detectors; ++d) {
      double sx, sy, dx, dy;
      ray_endpoints(geom, v, d, sx, sy, dx, dy);
      sino.at(v, d) = siddon_line_integral(Ray::through(sx, sy, dx, dy), image);
    }
  }
  return sino;
}

ImageGrid back_project(const Sinogram& sino, const FanBeamGeometry& geom,
                       int width, int height, double pixel_size) {
  geom.validate();
  if (sino.n_views != geom.n_views || sino.n_detectors != geom.n_detectors)
    throw ConfigError("back_project: sinogram shape does not match geometry");
  ImageGrid img(width, height, pixel_size);
  for (int v = 0; v < geom.n_views; ++v) {
    for (int d = 0; d < geom.n_detectors; ++d) {
      double val = sino.at(v, d);
      if (val == 0.0) continue;
      double sx, sy, dx, dy;
      ray_endpoints(geom, v, d, sx, sy, dx, dy);
      siddon_visit(Ray::through(sx, sy, dx, dy), width, height, pixel_size,
                   [&](std::size_t idx, double len) {
                     img.values[idx] += val * len;
                   });
    }
  }
  return img;
}

}  // namespace osdm
