#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "osdm/hankel.hpp"
#include "osdm/rng.hpp"
#include "osdm/types.hpp"

namespace osdm {

// Geometric VE noise levels sigma(i) = sigma_max*(sigma_min/sigma_max)^((N-i)/N),
// so sigma(N) = sigma_max and sigma(0) = sigma_min. Where the reverse-SDE
// discretization needs sigma_0 = 0, callers use sigma_for_predictor(0).
struct SigmaSchedule {
  double sigma_min = 0.01;
  double sigma_max = 1.0;
  int n_levels = 200;

  void validate() const {
    if (!(sigma_min > 0.0) || !(sigma_min < sigma_max))
      throw ConfigError("schedule: need 0 < sigma_min < sigma_max");
    if (n_levels < 1) throw ConfigError("schedule: n_levels must be >= 1");
  }

  double sigma(int i) const;
  // sigma_0 treated as 0 in the predictor coefficient.
  double sigma_for_predictor(int i) const { return i == 0 ? 0.0 : sigma(i); }
};

// Fixed four-layer 3x3 convolution network: 2 input channels (patch and a
// constant ln(sigma) channel), `hidden` feature maps with a smooth
// saturating nonlinearity x/sqrt(1+x^2), one linear output channel. The
// network is trained as a noise predictor (target -eps), so the score
// estimate is output/sigma.
struct ConvLayer {
  int in_ch = 0, out_ch = 0;
  std::vector<double> w;  // [out][in][3][3]
  std::vector<double> b;  // [out]

  double* weights(int oc, int ic) {
    return w.data() + (std::size_t(oc) * in_ch + ic) * 9;
  }
  const double* weights(int oc, int ic) const {
    return w.data() + (std::size_t(oc) * in_ch + ic) * 9;
  }
};

class ScoreNet {
 public:
  static constexpr int kLayers = 4;

  ScoreNet() = default;
  // Kaiming fan-in initialization for the hidden layers; the final layer
  // starts at zero so the untrained net predicts zero noise.
  ScoreNet(int hidden_channels, std::uint64_t init_seed);

  int hidden_channels() const { return hidden_; }
  std::array<ConvLayer, kLayers>& layers() { return layers_; }
  const std::array<ConvLayer, kLayers>& layers() const { return layers_; }

  std::uint64_t architecture_hash() const;
  std::size_t parameter_count() const;
  bool finite() const;

  // Raw network output on an rows x cols patch at noise level sigma.
  std::vector<double> forward(const std::vector<double>& x, int rows, int cols,
                              double sigma) const;

  double norm_factor = 1.0;  // data units per normalized unit
  SigmaSchedule schedule;

 private:
  int hidden_ = 0;
  std::array<ConvLayer, kLayers> layers_;
};

struct NetGrads {
  std::array<ConvLayer, ScoreNet::kLayers> layers;  // same shapes, grad values
  static NetGrads zeros_like(const ScoreNet& net);
  void accumulate(const NetGrads& other, double factor);
};

struct TrainConfig {
  int n_iters = 2000;
  int batch_size = 8;
  double learning_rate = 1e-3;
  std::uint64_t rng_seed = 0;
  double ema_decay = 0.999;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate <= 0");
    if (n_iters < 1 || batch_size < 1)
      throw ConfigError("train: n_iters and batch_size must be >= 1");
    if (!(ema_decay >= 0.0) || !(ema_decay < 1.0))
      throw ConfigError("train: ema_decay must be in [0,1)");
  }
};

// x_t = x0 + sigma*eps with eps ~ N(0, I) per element.
std::pair<std::vector<double>, std::vector<double>> perturb(
    const std::vector<double>& x0, double sigma, Rng& rng);

// Denoising score-matching loss ||net(x0 + sigma*eps, sigma) + eps||^2,
// summed per patch and averaged over the batch, with exact backprop
// gradients. Patches are patch_dim x patch_dim (from split_patches).
double dsm_loss(const ScoreNet& net, const std::vector<const double*>& batch,
                int patch_dim, const SigmaSchedule& schedule, Rng& rng,
                NetGrads* grads);

struct TrainResult {
  ScoreNet net;  // EMA parameters
  std::vector<double> loss_history;
};

TrainResult train(const PatchBatch& patches, const TrainConfig& config,
                  const SigmaSchedule& schedule, int hidden_channels = 32,
                  const ScoreNet* resume_from = nullptr);

// Score estimate grad_x log p_sigma(x) = net(x, sigma)/sigma.
std::vector<double> score(const ScoreNet& net, const std::vector<double>& x,
                          int rows, int cols, double sigma);

// Versioned binary checkpoint: architecture hash, parameters, schedule,
// normalization factor, training seed.
void save_checkpoint(const std::string& path, const ScoreNet& net,
                     std::uint64_t train_seed);
ScoreNet load_checkpoint(const std::string& path,
                         std::uint64_t* train_seed = nullptr);

}  // namespace osdm
