#include <cmath>

#include "doctest.h"
#include "osdm/rng.hpp"
#include "osdm/scorenet.hpp"

using namespace osdm;

namespace {

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

bool same_params(const ScoreNet& a, const ScoreNet& b) {
  for (int l = 0; l < ScoreNet::kLayers; ++l) {
    if (a.layers()[l].w != b.layers()[l].w) return false;
    if (a.layers()[l].b != b.layers()[l].b) return false;
  }
  return true;
}

PatchBatch delta_batch(const std::vector<double>& p0, int patch_dim,
                       int count) {
  PatchBatch pb;
  pb.patch_dim = patch_dim;
  pb.patches.assign(count, p0);
  return pb;
}

}  // namespace

TEST_CASE("sigma schedule endpoints and monotonicity") {
  SigmaSchedule s;
  s.sigma_min = 0.02;
  s.sigma_max = 5.0;
  s.n_levels = 50;
  s.validate();
  CHECK(s.sigma(50) == doctest::Approx(5.0));
  CHECK(s.sigma(0) == doctest::Approx(0.02));
  for (int i = 1; i <= 50; ++i) CHECK(s.sigma(i) > s.sigma(i - 1));
  CHECK(s.sigma_for_predictor(0) == 0.0);
  // Geometric: constant ratio between consecutive levels.
  double ratio = s.sigma(1) / s.sigma(0);
  for (int i = 2; i <= 50; ++i)
    CHECK(s.sigma(i) / s.sigma(i - 1) == doctest::Approx(ratio).epsilon(1e-12));
  SigmaSchedule bad;
  bad.sigma_min = 2.0;
  bad.sigma_max = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("perturb: sigma zero is the identity, statistics match") {
  Rng rng(4);
  std::vector<double> x0(500, 0.25);
  auto [xt, eps] = perturb(x0, 0.0, rng);
  CHECK(xt == x0);
  Rng rng2(4);
  auto [xt2, eps2] = perturb(x0, 0.5, rng2);
  double m = 0.0, v = 0.0;
  for (std::size_t i = 0; i < xt2.size(); ++i) {
    CHECK(xt2[i] == doctest::Approx(x0[i] + 0.5 * eps2[i]));
    m += eps2[i];
  }
  m /= eps2.size();
  for (double e : eps2) v += (e - m) * (e - m);
  v /= (eps2.size() - 1);
  CHECK(std::abs(m) < 4.0 / std::sqrt(500.0));
  CHECK(v == doctest::Approx(1.0).epsilon(0.25));
  // Deterministic per seed.
  Rng r3(4), r4(4);
  CHECK(perturb(x0, 0.3, r3) == perturb(x0, 0.3, r4));
}

TEST_CASE("zero-initialized final layer gives init loss ~= patch size") {
  // With net(x) = 0 the loss is E||eps||^2 = number of patch elements.
  ScoreNet net(8, 1);
  std::vector<double> p0(16 * 16, 0.0);
  Rng prng(2);
  for (auto& v : p0) v = prng.uniform();
  std::vector<const double*> batch(32, p0.data());
  SigmaSchedule sched;
  Rng rng(7);
  double loss = dsm_loss(net, batch, 16, sched, rng, nullptr);
  CHECK(loss == doctest::Approx(256.0).epsilon(0.25));
}

TEST_CASE("backprop matches finite differences") {
  ScoreNet net(3, 11);
  // Give the zero-initialized output layer nonzero weights so its input
  // gradient path is exercised too.
  Rng wr(5);
  for (auto& w : net.layers()[ScoreNet::kLayers - 1].w) w = 0.2 * wr.normal();
  std::vector<double> p0(6 * 6);
  for (auto& v : p0) v = wr.uniform();
  std::vector<const double*> batch{p0.data(), p0.data()};
  SigmaSchedule sched;

  auto loss_at = [&](const ScoreNet& n) {
    Rng rng(99);  // identical noise draws for every evaluation
    return dsm_loss(n, batch, 6, sched, rng, nullptr);
  };
  NetGrads grads = NetGrads::zeros_like(net);
  {
    Rng rng(99);
    dsm_loss(net, batch, 6, sched, rng, &grads);
  }
  double h = 1e-6;
  int checked = 0;
  Rng pick(13);
  for (int l = 0; l < ScoreNet::kLayers; ++l) {
    auto& layer = net.layers()[l];
    for (int k = 0; k < 6; ++k) {
      std::size_t i = pick.below(layer.w.size());
      double orig = layer.w[i];
      layer.w[i] = orig + h;
      double lp = loss_at(net);
      layer.w[i] = orig - h;
      double lm = loss_at(net);
      layer.w[i] = orig;
      double fd = (lp - lm) / (2.0 * h);
      double an = grads.layers[l].w[i];
      CHECK(std::abs(fd - an) <= 1e-4 * std::max(1.0, std::abs(fd)));
      ++checked;
    }
    for (std::size_t i = 0; i < layer.b.size(); ++i) {
      double orig = layer.b[i];
      layer.b[i] = orig + h;
      double lp = loss_at(net);
      layer.b[i] = orig - h;
      double lm = loss_at(net);
      layer.b[i] = orig;
      double fd = (lp - lm) / (2.0 * h);
      CHECK(std::abs(fd - grads.layers[l].b[i]) <=
            1e-4 * std::max(1.0, std::abs(fd)));
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("training reduces the loss") {
  Rng prng(6);
  std::vector<double> p0(8 * 8);
  for (auto& v : p0) v = prng.uniform();
  PatchBatch pb = delta_batch(p0, 8, 16);
  SigmaSchedule sched;
  TrainConfig cfg;
  cfg.n_iters = 800;
  cfg.batch_size = 8;
  cfg.learning_rate = 2e-3;
  cfg.rng_seed = 1;
  TrainResult res = train(pb, cfg, sched, 8);
  REQUIRE(res.loss_history.size() == 800);
  double head = 0.0, tail = 0.0;
  for (int i = 0; i < 40; ++i) head += res.loss_history[i];
  for (int i = 760; i < 800; ++i) tail += res.loss_history[i];
  CHECK(tail < 0.6 * head);
  CHECK(res.net.finite());
}

TEST_CASE("trained score approximates the analytic Gaussian score") {
  // Dataset = single patch p0, so p_sigma = N(p0, sigma^2 I) and the true
  // score at x is (p0 - x)/sigma^2.
  Rng prng(17);
  int d = 8;
  std::vector<double> p0(d * d);
  for (auto& v : p0) v = prng.uniform();
  PatchBatch pb = delta_batch(p0, d, 16);
  SigmaSchedule sched;
  sched.sigma_min = 0.05;
  sched.sigma_max = 0.5;
  sched.n_levels = 10;
  TrainConfig cfg;
  cfg.n_iters = 4000;
  cfg.batch_size = 8;
  cfg.learning_rate = 2e-3;
  cfg.rng_seed = 2;
  ScoreNet net = train(pb, cfg, sched, 16).net;

  double sigma = std::sqrt(sched.sigma_min * sched.sigma_max);  // mid level
  Rng xr(23);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(p0);
    for (auto& v : x) v += sigma * xr.normal();
    auto got = score(net, x, d, d, sigma);
    std::vector<double> ref(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      ref[i] = (p0[i] - x[i]) / (sigma * sigma);
    worst = std::max(worst, rel_l2(got, ref));
  }
  CHECK(worst < 0.35);
}

TEST_CASE("training is deterministic in the seed") {
  Rng prng(8);
  std::vector<double> p0(4 * 4);
  for (auto& v : p0) v = prng.uniform();
  PatchBatch pb = delta_batch(p0, 4, 8);
  SigmaSchedule sched;
  TrainConfig cfg;
  cfg.n_iters = 50;
  cfg.rng_seed = 12;
  TrainResult a = train(pb, cfg, sched, 4);
  TrainResult b = train(pb, cfg, sched, 4);
  CHECK(same_params(a.net, b.net));
  CHECK(a.loss_history == b.loss_history);
  cfg.rng_seed = 13;
  TrainResult c = train(pb, cfg, sched, 4);
  CHECK(!same_params(a.net, c.net));
}

TEST_CASE("score rejects nonpositive sigma") {
  ScoreNet net(4, 3);
  std::vector<double> x(16, 0.0);
  CHECK_THROWS_AS(score(net, x, 4, 4, 0.0), ConfigError);
  CHECK_THROWS_AS(score(net, x, 4, 4, -1.0), ConfigError);
}

TEST_CASE("untrained net scores zero (zero-init output layer)") {
  ScoreNet net(8, 21);
  std::vector<double> x(36);
  Rng rng(2);
  for (auto& v : x) v = rng.normal();
  auto s = score(net, x, 6, 6, 0.3);
  for (double v : s) CHECK(v == 0.0);
}
