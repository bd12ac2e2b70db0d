#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "osdm/hankel.hpp"
#include "osdm/rng.hpp"

using namespace osdm;

namespace {

std::vector<double> random_array(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double frob_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("hankel shape and entries for a small hand case") {
  // 5 x 7 array with window 3: 9 rows, (5-3+1)*(7-3+1) = 15 columns.
  int rows = 5, cols = 7, a = 3;
  auto x = random_array(rows * cols, 1);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  CHECK(H.rows() == 9);
  CHECK(H.cols() == 15);
  // Column for window position (r0, c0) is the row-major window vector.
  for (int r0 = 0; r0 <= rows - a; ++r0)
    for (int c0 = 0; c0 <= cols - a; ++c0) {
      int col = r0 * (cols - a + 1) + c0;
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j)
          CHECK(H.at(i * a + j, col) == x[std::size_t(r0 + i) * cols + c0 + j]);
    }
}

TEST_CASE("window 1 reduces to a row vector of the array") {
  auto x = random_array(12, 2);
  HankelMatrix H = hankel_transform(x, 3, 4, 1);
  CHECK(H.rows() == 1);
  CHECK(H.cols() == 12);
  CHECK(H.data == x);
}

TEST_CASE("hankel round trip is exact for several window sizes") {
  for (int a : {1, 2, 4, 8}) {
    int rows = 17, cols = 13;
    auto x = random_array(rows * cols, 10 + a);
    HankelMatrix H = hankel_transform(x, rows, cols, a);
    auto back = hankel_inverse(H);
    REQUIRE(back.size() == x.size());
    // Identical-value averaging makes the round trip bitwise exact.
    CHECK(back == x);
  }
}

TEST_CASE("hankel pseudo-inverse averages: single perturbed entry") {
  // Perturbing one Hankel entry by delta changes the source pixel by
  // delta / (number of windows covering that pixel).
  int rows = 9, cols = 9, a = 3;
  auto x = random_array(rows * cols, 4);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  int pr = 4, pc = 4;  // interior pixel covered by a^2 = 9 windows
  // Window (r0,c0) covers it at in-window offset (pr-r0, pc-c0).
  int r0 = 3, c0 = 2;
  int col = r0 * (cols - a + 1) + c0;
  int row = (pr - r0) * a + (pc - c0);
  H.at(row, col) += 0.9;
  auto back = hankel_inverse(H);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double expect = x[std::size_t(r) * cols + c];
      if (r == pr && c == pc) expect += 0.9 / 9.0;
      CHECK(back[std::size_t(r) * cols + c] == doctest::Approx(expect));
    }
}

TEST_CASE("split_patches cuts the transposed matrix into square patches") {
  int rows = 20, cols = 20, a = 4;  // 17*17 = 289 positions, patch_dim 16
  auto x = random_array(rows * cols, 6);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  PatchBatch pb = split_patches(H, 77);
  CHECK(pb.patch_dim == 16);
  // 289 transposed rows / 16 = 18 patches, tail of 1 dropped.
  CHECK(pb.patches.size() == 18);
  for (const auto& p : pb.patches) CHECK(p.size() == 256);
  // Every patch row must be some Hankel column (the shuffle is a bijection
  // on positions), and no position may repeat.
  std::set<int> used;
  for (const auto& p : pb.patches)
    for (int r = 0; r < 16; ++r) {
      int found = -1;
      for (int c = 0; c < H.cols() && found < 0; ++c) {
        bool eq = true;
        for (int k = 0; k < 16 && eq; ++k)
          eq = (p[std::size_t(r) * 16 + k] == H.at(k, c));
        if (eq) found = c;
      }
      REQUIRE(found >= 0);
      CHECK(used.insert(found).second);
    }
  // Seeded: same seed reproduces, different seed permutes differently.
  PatchBatch pb2 = split_patches(H, 77);
  CHECK(pb.patches == pb2.patches);
  PatchBatch pb3 = split_patches(H, 78);
  CHECK(pb.patches != pb3.patches);
}

TEST_CASE("singular values match a one-sided Jacobi oracle") {
  int rows = 14, cols = 11, a = 3;
  auto x = random_array(rows * cols, 8);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  auto sv = hankel_singular_values(H);
  auto ref = oracles::jacobi_singular_values(H.data, H.rows(), H.cols());
  REQUIRE(sv.size() <= ref.size());
  for (std::size_t i = 0; i < sv.size(); ++i)
    CHECK(sv[i] == doctest::Approx(ref[i]).epsilon(1e-8).scale(ref[0]));
}

TEST_CASE("svd_hard_threshold is the Eckart-Young optimum") {
  int rows = 12, cols = 12, a = 4;
  auto x = random_array(rows * cols, 9);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  auto ref_sv = oracles::jacobi_singular_values(H.data, H.rows(), H.cols());
  for (int K : {1, 3, 7}) {
    HankelMatrix Hk = svd_hard_threshold(H, K);
    double err = frob_diff(Hk.data, H.data);
    double best = 0.0;
    for (std::size_t i = K; i < ref_sv.size(); ++i)
      best += ref_sv[i] * ref_sv[i];
    best = std::sqrt(best);
    CHECK(err == doctest::Approx(best).epsilon(1e-8).scale(ref_sv[0]));
    // The result has numerical rank <= K.
    auto sv_k = hankel_singular_values(Hk);
    // The Gram route resolves zero singular values only to ~sqrt(eps)*sv0.
    for (std::size_t i = K; i < sv_k.size(); ++i)
      CHECK(sv_k[i] < 1e-7 * sv_k[0] + 1e-12);
  }
}

TEST_CASE("svd_hard_threshold passes through at full rank") {
  int rows = 10, cols = 10, a = 3;
  auto x = random_array(rows * cols, 12);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  HankelMatrix Hk = svd_hard_threshold(H, std::min(H.rows(), H.cols()) + 5);
  for (std::size_t i = 0; i < H.data.size(); ++i)
    CHECK(Hk.data[i] == H.data[i]);
}

TEST_CASE("rank-1 matrices survive K=1 thresholding exactly") {
  // A constant array gives a rank-1 Hankel matrix.
  int rows = 11, cols = 9, a = 3;
  std::vector<double> x(std::size_t(rows) * cols, 2.5);
  HankelMatrix H = hankel_transform(x, rows, cols, a);
  HankelMatrix H1 = svd_hard_threshold(H, 1);
  for (std::size_t i = 0; i < H.data.size(); ++i)
    CHECK(H1.data[i] == doctest::Approx(H.data[i]).epsilon(1e-12));
}

TEST_CASE("hankel transform is linear") {
  int rows = 8, cols = 9, a = 3;
  auto x = random_array(rows * cols, 14);
  auto y = random_array(rows * cols, 15);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = 2.0 * x[i] - y[i];
  HankelMatrix Hx = hankel_transform(x, rows, cols, a);
  HankelMatrix Hy = hankel_transform(y, rows, cols, a);
  HankelMatrix Hz = hankel_transform(z, rows, cols, a);
  for (std::size_t i = 0; i < Hz.data.size(); ++i)
    CHECK(Hz.data[i] == 2.0 * Hx.data[i] - Hy.data[i]);
}

TEST_CASE("composite low-rank denoiser contracts toward rank-K data") {
  // Build a sum of K separable harmonics (low Hankel rank), add noise, and
  // check H+ o svd_K o H reduces the error without expanding anything.
  int rows = 24, cols = 24, a = 8;
  // cos x cos factors into 4 exponential products, plus the constant: the
  // structural Hankel rank is at most 5, so K = 6 keeps clean data fixed.
  int K = 6;
  std::vector<double> clean(std::size_t(rows) * cols, 0.5);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      clean[std::size_t(r) * cols + c] += std::cos(0.3 * r) * std::cos(0.25 * c);
  Rng rng(55);
  std::vector<double> noisy(clean);
  for (auto& v : noisy) v += 0.05 * rng.normal();
  auto denoise = [&](const std::vector<double>& v) {
    HankelMatrix H = hankel_transform(v, rows, cols, a);
    return hankel_inverse(svd_hard_threshold(H, K));
  };
  auto den = denoise(noisy);
  CHECK(frob_diff(den, clean) < frob_diff(noisy, clean));
  // Clean data itself is (numerically) rank <= K, so it is nearly fixed.
  auto clean_back = denoise(clean);
  CHECK(frob_diff(clean_back, clean) < 1e-6 * frob_diff(clean, std::vector<double>(clean.size(), 0.0)));
}
