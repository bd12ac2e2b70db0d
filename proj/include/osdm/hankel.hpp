#pragma once

#include <cstdint>
#include <vector>

#include "osdm/types.hpp"

namespace osdm {

// Structural-Hankel matrix of a Wx x Wy array: each column is the
// vectorized a x a sliding window (stride 1, no padding) at its source
// position; columns are ordered row-major over positions.
struct HankelMatrix {
  int window = 0;  // a
  int src_rows = 0, src_cols = 0;  // Wx, Wy
  std::vector<double> data;  // a^2 rows x n_positions cols, row-major

  int rows() const { return window * window; }
  int cols() const {
    return (src_rows - window + 1) * (src_cols - window + 1);
  }
  double& at(int r, int c) { return data[std::size_t(r) * cols() + c]; }
  double at(int r, int c) const { return data[std::size_t(r) * cols() + c]; }
};

// a^2 x a^2 patches cut from the transposed Hankel matrix after a seeded
// row shuffle; the tail that does not fill a patch is dropped.
struct PatchBatch {
  int patch_dim = 0;  // a^2
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> patches;  // each patch_dim*patch_dim
};

HankelMatrix hankel_transform(const std::vector<double>& x, int rows, int cols,
                              int window);
inline HankelMatrix hankel_transform(const Sinogram& s, int window) {
  return hankel_transform(s.values, s.n_views, s.n_detectors, window);
}

// Pseudo-inverse: every source pixel is the mean of all matrix entries
// copied from it.
std::vector<double> hankel_inverse(const HankelMatrix& H);

PatchBatch split_patches(const HankelMatrix& H, std::uint64_t seed);

// Best rank-<=K Frobenius approximation (hard singular value threshold).
// K beyond min(rows, cols) passes the matrix through.
HankelMatrix svd_hard_threshold(const HankelMatrix& H, int K);

// Descending singular values of H (through the Gram matrix of the smaller
// side). Exposed for rank diagnostics and tests.
std::vector<double> hankel_singular_values(const HankelMatrix& H);

}  // namespace osdm
