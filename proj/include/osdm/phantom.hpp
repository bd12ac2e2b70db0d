#pragma once

#include "osdm/types.hpp"

namespace osdm {

// Rasterize the ellipse list: pixels whose centers fall inside an ellipse
// receive its additive value.
ImageGrid make_phantom(const EllipsePhantom& spec, int width, int height,
                       double pixel_size);

// Shepp-Logan-style head phantom scaled to attenuation units (1/cm) and to
// the given field-of-view radius. Used as the default synthetic object.
EllipsePhantom head_phantom(double fov_radius_cm, double mu_water = 0.2);

bool inside_ellipse(const Ellipse& e, double x, double y);

}  // namespace osdm
