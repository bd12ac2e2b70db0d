#include "osdm/hankel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osdm/rng.hpp"

namespace osdm {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

HankelMatrix hankel_transform(const std::vector<double>& x, int rows, int cols,
                              int window) {
  if (window < 1 || window > std::min(rows, cols))
    throw ConfigError("hankel_transform: window must be in [1, min dims]");
  if (x.size() != std::size_t(rows) * cols)
    throw ConfigError("hankel_transform: data size mismatch");
  HankelMatrix H;
  H.window = window;
  H.src_rows = rows;
  H.src_cols = cols;
  const int pr = rows - window + 1, pc = cols - window + 1;
  H.data.assign(std::size_t(window) * window * pr * pc, 0.0);
  const int ncols = pr * pc;
  for (int i = 0; i < pr; ++i)
    for (int j = 0; j < pc; ++j) {
      int col = i * pc + j;
      for (int u = 0; u < window; ++u)
        for (int v = 0; v < window; ++v)
          H.data[std::size_t(u * window + v) * ncols + col] =
              x[std::size_t(i + u) * cols + (j + v)];
    }
  return H;
}

std::vector<double> hankel_inverse(const HankelMatrix& H) {
  const int a = H.window, rows = H.src_rows, cols = H.src_cols;
  const int pr = rows - a + 1, pc = cols - a + 1;
  const int ncols = pr * pc;
  std::vector<double> acc(std::size_t(rows) * cols, 0.0);
  std::vector<double> cnt(acc.size(), 0.0);
  // Track the first copy seen per pixel: when every copy is identical the
  // mean is that value exactly (sum/count would round for odd counts).
  std::vector<double> first(acc.size(), 0.0);
  std::vector<unsigned char> uniform(acc.size(), 1);
  for (int i = 0; i < pr; ++i)
    for (int j = 0; j < pc; ++j) {
      int col = i * pc + j;
      for (int u = 0; u < a; ++u)
        for (int v = 0; v < a; ++v) {
          std::size_t p = std::size_t(i + u) * cols + (j + v);
          double val = H.data[std::size_t(u * a + v) * ncols + col];
          if (cnt[p] == 0.0)
            first[p] = val;
          else if (val != first[p])
            uniform[p] = 0;
          acc[p] += val;
          cnt[p] += 1.0;
        }
    }
  for (std::size_t p = 0; p < acc.size(); ++p)
    acc[p] = uniform[p] ? first[p] : acc[p] / cnt[p];
  return acc;
}

PatchBatch split_patches(const HankelMatrix& H, std::uint64_t seed) {
  const int a2 = H.rows();
  const int ncols = H.cols();
  if (ncols < a2) throw ConfigError("split_patches: need at least a^2 columns");

  std::vector<int> perm(ncols);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = ncols - 1; i > 0; --i)
    std::swap(perm[i], perm[int(rng.below(std::uint64_t(i) + 1))]);

  PatchBatch batch;
  batch.patch_dim = a2;
  batch.seed = seed;
  const int n_patches = ncols / a2;
  batch.patches.reserve(n_patches);
  for (int p = 0; p < n_patches; ++p) {
    std::vector<double> patch(std::size_t(a2) * a2);
    for (int r = 0; r < a2; ++r) {
      int src_col = perm[p * a2 + r];
      // patch row r = Hankel column src_col (transposed orientation)
      for (int c = 0; c < a2; ++c)
        patch[std::size_t(r) * a2 + c] = H.at(c, src_col);
    }
    batch.patches.push_back(std::move(patch));
  }
  return batch;
}

HankelMatrix svd_hard_threshold(const HankelMatrix& H, int K) {
  if (K < 1) throw ConfigError("svd_hard_threshold: K must be >= 1");
  const int r = H.rows(), c = H.cols();
  if (K >= std::min(r, c)) return H;  // full-rank pass-through

  Eigen::Map<const RowMat> M(H.data.data(), r, c);
  HankelMatrix out = H;
  Eigen::Map<RowMat> O(out.data.data(), r, c);

  // Eigendecompose the Gram matrix of the smaller side, then project onto
  // the leading singular subspace.
  if (r <= c) {
    Eigen::MatrixXd G = M * M.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::MatrixXd Uk = es.eigenvectors().rightCols(K);  // ascending order
    O = Uk * (Uk.transpose() * M);
  } else {
    Eigen::MatrixXd G = M.transpose() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::MatrixXd Vk = es.eigenvectors().rightCols(K);
    O = (M * Vk) * Vk.transpose();
  }
  return out;
}

std::vector<double> hankel_singular_values(const HankelMatrix& H) {
  const int r = H.rows(), c = H.cols();
  Eigen::Map<const RowMat> M(H.data.data(), r, c);
  Eigen::MatrixXd G = (r <= c) ? Eigen::MatrixXd(M * M.transpose())
                               : Eigen::MatrixXd(M.transpose() * M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  std::vector<double> sv(std::size_t(std::min(r, c)));
  for (std::size_t i = 0; i < sv.size(); ++i) {
    double lambda = es.eigenvalues()[Eigen::Index(sv.size() - 1 - i)];
    sv[i] = std::sqrt(std::max(lambda, 0.0));
  }
  return sv;
}

}  // namespace osdm
