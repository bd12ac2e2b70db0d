#include <cmath>

#include "doctest.h"
#include "osdm/lowdose.hpp"
#include "osdm/metrics.hpp"
#include "osdm/rng.hpp"

using namespace osdm;

namespace {

Sinogram constant_sino(int v, int d, double value) {
  Sinogram s(v, d);
  for (auto& x : s.values) x = value;
  return s;
}

}  // namespace

TEST_CASE("photon model validation") {
  PhotonModel m;
  m.eta = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = {};
  m.background = -1.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = {};
  m.background = m.source_intensity;  // need a > r
  CHECK_THROWS_AS(m.validate(), ConfigError);
}

TEST_CASE("simulated counts have the right Poisson mean") {
  PhotonModel m;
  m.source_intensity = 1e4;
  m.rng_seed = 7;
  // x = 0 => mean counts = I0 per ray.
  Sinogram x = constant_sino(100, 100, 0.0);
  auto counts = simulate_counts(x, m);
  double mean = 0.0;
  for (double c : counts) mean += c;
  mean /= counts.size();
  // SE of the sample mean is sqrt(I0/n); allow 4 sigma.
  double se = std::sqrt(m.source_intensity / double(counts.size()));
  CHECK(std::abs(mean - m.source_intensity) < 4.0 * se);
}

TEST_CASE("simulation is deterministic in the seed and order-independent") {
  PhotonModel m;
  m.rng_seed = 99;
  Sinogram x(17, 23);
  Rng rng(3);
  for (auto& v : x.values) v = 5000.0 * rng.uniform();
  auto a = simulate_counts(x, m);
  auto b = simulate_counts(x, m);
  CHECK(a == b);
  m.rng_seed = 100;
  auto c = simulate_counts(x, m);
  CHECK(a != c);
}

TEST_CASE("log transform inverts the noiseless mean model exactly") {
  PhotonModel m;
  Sinogram x(5, 7);
  Rng rng(11);
  for (auto& v : x.values) v = 30000.0 * rng.uniform();
  // Noiseless fractional counts: L = a*exp(-x/eta) + r.
  std::vector<double> counts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    counts[i] = m.source_intensity * std::exp(-x.values[i] / m.eta) +
                m.background;
  Sinogram y = log_transform(counts, 5, 7, m);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(y.values[i] == doctest::Approx(x.values[i]).epsilon(1e-12));
}

TEST_CASE("log transform mean matches the input over Monte Carlo draws") {
  PhotonModel m;
  m.source_intensity = 1e5;
  double x0 = 8000.0;
  int n = 20000;
  Sinogram x = constant_sino(n, 1, x0);
  m.rng_seed = 5;
  auto counts = simulate_counts(x, m);
  Sinogram y = log_transform(counts, n, 1, m);
  double mean = 0.0, var = 0.0;
  for (double v : y.values) mean += v;
  mean /= n;
  for (double v : y.values) var += (v - mean) * (v - mean);
  var /= (n - 1);
  // First-order: Var[y] ~= eta^2 * exp(x/eta) / I0; small-bias mean ~= x.
  double pred_var = m.eta * m.eta * std::exp(x0 / m.eta) / m.source_intensity;
  double se = std::sqrt(var / n);
  CHECK(std::abs(mean - x0) < 3.0 * se + 0.5);  // +0.5 for the log bias
  CHECK(var == doctest::Approx(pred_var).epsilon(0.10));
}

TEST_CASE("count floor keeps starved rays finite") {
  PhotonModel m;
  m.source_intensity = 10.0;
  std::vector<double> counts{0.0, 0.5, 1.0};
  Sinogram y = log_transform(counts, 1, 3, m);
  for (double v : y.values) CHECK(std::isfinite(v));
  // Floored entries all map to eta*ln(a/1).
  double capped = m.eta * std::log(m.source_intensity / kCountFloor);
  CHECK(y.values[0] == doctest::Approx(capped));
  CHECK(y.values[1] == doctest::Approx(capped));
}

TEST_CASE("pwls weights: value at zero, monotone decay") {
  PhotonModel m;
  Sinogram y(1, 4);
  y.values = {0.0, 5000.0, 10000.0, 20000.0};
  auto w = pwls_weights(y, m);
  CHECK(w[0] == doctest::Approx(m.source_intensity));
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] < w[i - 1]);
  CHECK(w[1] == doctest::Approx(m.source_intensity * std::exp(-5000.0 / m.eta)));
}

TEST_CASE("lower dose produces higher sinogram MSE") {
  Sinogram x(64, 64);
  Rng rng(31);
  for (auto& v : x.values) v = 20000.0 * rng.uniform();
  auto run = [&](double dose) {
    PhotonModel m;
    m.source_intensity = dose;
    m.rng_seed = 8;
    auto counts = simulate_counts(x, m);
    Sinogram y = log_transform(counts, 64, 64, m);
    return mse(y.values, x.values);
  };
  double hi = run(1e6), mid = run(1e5), lo = run(1e4);
  CHECK(mid > hi);
  CHECK(lo > mid);
  // Variance scales like 1/I0, so a decade of dose is ~10x the MSE.
  CHECK(lo / mid > 8.0);
  CHECK(mid / hi > 8.0);
}
