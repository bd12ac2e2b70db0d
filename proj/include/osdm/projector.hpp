#pragma once

#include <functional>

#include "osdm/types.hpp"

namespace osdm {

// Exact line integral of the grid along the ray (Siddon traversal).
// A ray missing the grid contributes 0.
double siddon_line_integral(const Ray& ray, const ImageGrid& grid);

// Visit every (pixel index, intersection length) pair along the ray.
// Forward and back projection share this traversal so they are exact
// adjoints of each other.
void siddon_visit(const Ray& ray, int width, int height, double pixel_size,
                  const std::function<void(std::size_t, double)>& visit);

// Source position and detector-element center for (view, detector).
void ray_endpoints(const FanBeamGeometry& geom, int view, int det,
                   double& sx, double& sy, double& dx, double& dy);

Sinogram forward_project(const ImageGrid& image, const FanBeamGeometry& geom);

// Exact adjoint of forward_project. Shape mismatch is an error.
ImageGrid back_project(const Sinogram& sino, const FanBeamGeometry& geom,
                       int width, int height, double pixel_size);

}  // namespace osdm
