#include <cmath>

#include "doctest.h"
#include "osdm/metrics.hpp"
#include "osdm/rng.hpp"

using namespace osdm;

TEST_CASE("mse identities") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  CHECK(mse(a, a) == 0.0);
  std::vector<double> b{1.0, 2.0, 3.0, 6.0};
  CHECK(mse(a, b) == doctest::Approx(4.0 / 4.0));
  CHECK(mse(a, b) == mse(b, a));
}

TEST_CASE("psnr of identical inputs is capped") {
  std::vector<double> a{0.5, 0.25, 1.0};
  CHECK(psnr(a, a) == kPsnrCap);
}

TEST_CASE("psnr closed form for a uniform offset") {
  // ref max 1, every element off by d: PSNR = 20*log10(1/d).
  int n = 100;
  std::vector<double> ref(n, 0.0);
  ref[0] = 1.0;
  double d = 0.01;
  std::vector<double> test(ref);
  for (auto& v : test) v += d;
  CHECK(psnr(test, ref) == doctest::Approx(20.0 * std::log10(1.0 / d)).epsilon(1e-10));
  // Unnormalized variant divides by ||diff||_2 = d*sqrt(n) instead.
  CHECK(psnr(test, ref, true) ==
        doctest::Approx(20.0 * std::log10(1.0 / (d * std::sqrt(double(n)))))
            .epsilon(1e-10));
}

TEST_CASE("psnr decreases with noise level") {
  Rng rng(3);
  int n = 64 * 64;
  std::vector<double> ref(n);
  for (auto& v : ref) v = rng.uniform();
  auto noisy = [&](double s, std::uint64_t seed) {
    Rng r2(seed);
    std::vector<double> t(ref);
    for (auto& v : t) v += s * r2.normal();
    return t;
  };
  double p1 = psnr(noisy(0.01, 5), ref);
  double p2 = psnr(noisy(0.05, 5), ref);
  double p3 = psnr(noisy(0.25, 5), ref);
  CHECK(p1 > p2);
  CHECK(p2 > p3);
}

TEST_CASE("ssim is 1 for identical images and symmetric") {
  Rng rng(7);
  int n = 32;
  std::vector<double> a(n * n), b(n * n);
  for (auto& v : a) v = rng.uniform();
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = a[i] + 0.1 * rng.normal();
  CHECK(ssim(a, a, n, n, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim(a, b, n, n, 1.0) == doctest::Approx(ssim(b, a, n, n, 1.0)).epsilon(1e-12));
  double s = ssim(a, b, n, n, 1.0);
  CHECK(s > 0.0);
  CHECK(s < 1.0);
}

TEST_CASE("ssim of structurally opposite images is low") {
  int n = 32;
  std::vector<double> a(n * n), b(n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      bool on = ((r / 4) + (c / 4)) % 2 == 0;
      a[std::size_t(r) * n + c] = on ? 1.0 : 0.0;
      b[std::size_t(r) * n + c] = on ? 0.0 : 1.0;  // inverted checkerboard
    }
  CHECK(ssim(a, b, n, n, 1.0) < 0.2);
}

TEST_CASE("evaluate bundles all three metrics consistently") {
  Rng rng(9);
  int n = 24;
  std::vector<double> ref(n * n), test(n * n);
  for (auto& v : ref) v = rng.uniform();
  for (std::size_t i = 0; i < test.size(); ++i)
    test[i] = ref[i] + 0.02 * rng.normal();
  MetricReport rep = evaluate(test, ref, n, n, 1.0);
  CHECK(rep.mse == doctest::Approx(mse(test, ref)));
  CHECK(rep.psnr == doctest::Approx(psnr(test, ref)));
  CHECK(rep.ssim == doctest::Approx(ssim(test, ref, n, n, 1.0)));
}
