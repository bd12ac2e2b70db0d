#include "osdm/tv.hpp"

#include <cmath>

namespace osdm {

namespace {
inline double diff_r(const std::vector<double>& x, int rows, int cols, int r,
                     int c) {
  return (r + 1 < rows) ? x[std::size_t(r + 1) * cols + c] - x[std::size_t(r) * cols + c]
                        : 0.0;
}
inline double diff_c(const std::vector<double>& x, int rows, int cols, int r,
                     int c) {
  return (c + 1 < cols) ? x[std::size_t(r) * cols + c + 1] - x[std::size_t(r) * cols + c]
                        : 0.0;
}
}  // namespace

double tv_value(const std::vector<double>& x, int rows, int cols, double eps) {
  double acc = 0.0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double dr = diff_r(x, rows, cols, r, c);
      double dc = diff_c(x, rows, cols, r, c);
      acc += std::sqrt(dr * dr + dc * dc + eps * eps);
    }
  return acc;
}

std::vector<double> tv_gradient(const std::vector<double>& x, int rows,
                                int cols, double eps) {
  std::vector<double> g(x.size(), 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double dr = diff_r(x, rows, cols, r, c);
      double dc = diff_c(x, rows, cols, r, c);
      double m = std::sqrt(dr * dr + dc * dc + eps * eps);
      std::size_t i = std::size_t(r) * cols + c;
      g[i] -= (dr + dc) / m;
      if (r + 1 < rows) g[i + cols] += dr / m;
      if (c + 1 < cols) g[i + 1] += dc / m;
    }
  return g;
}

}  // namespace osdm
