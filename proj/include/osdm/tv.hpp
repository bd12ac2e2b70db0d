#pragma once

#include <cstddef>
#include <vector>

namespace osdm {

// Epsilon-smoothed isotropic total variation of a rows x cols array
// (forward differences, Neumann boundary).
double tv_value(const std::vector<double>& x, int rows, int cols,
                double eps = 1e-8);

// Gradient of tv_value w.r.t. x; same shape.
std::vector<double> tv_gradient(const std::vector<double>& x, int rows,
                                int cols, double eps = 1e-8);

}  // namespace osdm
