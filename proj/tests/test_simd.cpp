#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "osdm/simd.hpp"

using namespace osdm;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(eng);
  return v;
}

bool close(double a, double b, double rel = 1e-11) {
  return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  const auto& ref = simd::scalar_kernels;
  const auto& act = simd::active();
  INFO("active variant: ", simd::active_name());

  for (std::size_t n : {std::size_t(1), std::size_t(7), std::size_t(64),
                        std::size_t(1001)}) {
    auto a = random_vec(n + 2, 11 * n);
    auto b = random_vec(n + 2, 13 * n);

    CHECK(close(ref.dot(a.data(), b.data(), n), act.dot(a.data(), b.data(), n)));
    CHECK(close(ref.sum(a.data(), n), act.sum(a.data(), n), 1e-10));
    CHECK(close(ref.sumsq(a.data(), n), act.sumsq(a.data(), n)));

    auto y1 = b, y2 = b;
    ref.axpy(y1.data(), 0.37, a.data(), n);
    act.axpy(y2.data(), 0.37, a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));

    auto s1 = a, s2 = a;
    ref.scale(s1.data(), -1.7, n);
    act.scale(s2.data(), -1.7, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == doctest::Approx(s2[i]));

    auto f1 = a, f2 = a;
    ref.smoothsat(f1.data(), b.data(), n);
    act.smoothsat(f2.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(f1[i], f2[i]));

    auto g1 = random_vec(n, 17 * n), g2 = g1;
    ref.smoothsat_grad(g1.data(), a.data(), b.data(), n);
    act.smoothsat_grad(g2.data(), a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(g1[i], g2[i]));
  }
}

TEST_CASE("conv3x3 row kernel equivalence") {
  const auto& ref = simd::scalar_kernels;
  const auto& act = simd::active();
  for (std::size_t n : {std::size_t(3), std::size_t(62), std::size_t(64)}) {
    auto r0 = random_vec(n + 2, 1), r1 = random_vec(n + 2, 2),
         r2 = random_vec(n + 2, 3);
    auto w = random_vec(9, 4);
    auto o1 = random_vec(n, 5), o2 = o1;
    ref.conv3x3_row(o1.data(), r0.data(), r1.data(), r2.data(), w.data(), n);
    act.conv3x3_row(o2.data(), r0.data(), r1.data(), r2.data(), w.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i]));
  }
}

TEST_CASE("smoothsat values") {
  double x[3] = {0.0, 1.0, -3.0};
  double y[3];
  simd::scalar_kernels.smoothsat(y, x, 3);
  CHECK(y[0] == doctest::Approx(0.0));
  CHECK(y[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(y[2] == doctest::Approx(-3.0 / std::sqrt(10.0)));
}
