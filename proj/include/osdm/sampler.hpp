#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "osdm/fbp.hpp"
#include "osdm/scorenet.hpp"
#include "osdm/types.hpp"

namespace osdm {

struct ReconConfig {
  int outer_steps = 200;    // N (paper default 1000)
  int inner_steps = 1;      // M (paper default 2)
  int rank = 38;            // K
  double tv_alpha = 10.0;   // TV gradient-descent step length
  double pwls_mu = 0.5;     // balance weight
  double corrector_snr = 0.16;  // r in the step-size rule
  int hankel_window = 8;    // a
  // Stride between evaluated window positions when the score network is
  // applied to the full sinogram through its Hankel matrix. Stride =
  // hankel_window evaluates disjoint windows (cheap); stride = 1 covers
  // every position as in split_patches.
  int score_stride = 8;
  SigmaSchedule schedule;
  bool enable_diffusion = true;
  bool enable_lr = true;
  bool enable_tv = true;
  bool enable_pwls = true;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (outer_steps < 1) throw ConfigError("recon: outer_steps must be >= 1");
    if (inner_steps < 0) throw ConfigError("recon: inner_steps must be >= 0");
    if (rank < 1) throw ConfigError("recon: rank must be >= 1");
    if (!(tv_alpha > 0.0)) throw ConfigError("recon: tv_alpha must be > 0");
    if (pwls_mu < 0.0) throw ConfigError("recon: pwls_mu must be >= 0");
    if (!(corrector_snr > 0.0)) throw ConfigError("recon: snr must be > 0");
    if (hankel_window < 1) throw ConfigError("recon: window must be >= 1");
    if (score_stride < 1 || score_stride > hankel_window)
      throw ConfigError("recon: score_stride must be in [1, window]");
    schedule.validate();
  }
};

struct SamplerState {
  std::vector<double> x;  // current sinogram estimate, normalized units
  int rows = 0, cols = 0;
  int step = 0;
  Rng rng{0};
};

struct TraceRow {
  int step = 0;
  double sigma = 0.0;
  double data_fidelity = 0.0;  // ||x - y||_W
  double tv = 0.0;
  double psnr = 0.0;  // vs reference sinogram when supplied, else NaN
};

// Score of the full sinogram estimate: the network is applied to the
// Hankel matrix tiled into a^2 x a^2 blocks and the per-entry scores are
// mapped back through the anti-diagonal averaging of H+.
std::vector<double> sinogram_score(const ScoreNet& net,
                                   const std::vector<double>& x, int rows,
                                   int cols, double sigma,
                                   const ReconConfig& cfg);

// Reverse-SDE discretization x += (s2b - s2a)*score + sqrt(s2b - s2a)*z
// with s2b = sigma_{i+1}^2, s2a = sigma_i^2.
void predictor_step(SamplerState& state, const ScoreNet& net,
                    const ReconConfig& cfg, int level);

// Annealed Langevin correction with eps = 2*(r*||z||/||score||)^2; a zero
// score field skips the step.
void corrector_step(SamplerState& state, const ScoreNet& net,
                    const ReconConfig& cfg, int level);

// x -> H+(rank-K truncation of H(x)).
std::vector<double> lr_step(const std::vector<double>& x, int rows, int cols,
                            int window, int rank);

// Elementwise closed-form minimizer of W(x-y)^2 + mu(x-p)^2.
std::vector<double> pwls_step(const std::vector<double>& y,
                              const std::vector<double>& weights,
                              const std::vector<double>& prior, double mu);

// One normalized TV descent step scaled by ||x - x_prev||, halving the
// step up to 5 times if TV would increase (unchanged input otherwise).
std::vector<double> tv_step(const std::vector<double>& x, int rows, int cols,
                            double alpha, const std::vector<double>& x_prev);

struct ReconResult {
  Sinogram sinogram;   // restored sinogram, stored units
  ImageGrid image;     // FBP of the restored sinogram
  std::vector<TraceRow> trace;
};

struct ReconContext {
  FanBeamGeometry geom;
  FilterSpec filter;
  int image_width = 128;
  int image_height = 128;
  double pixel_size = 0.15;
  const Sinogram* reference = nullptr;  // optional, for the PSNR trace
};

// Algorithm: initialize from sigma_max noise (diffusion on) or from y,
// then for each outer step run predictor + LR/PWLS/TV consistency, and M
// inner corrector iterations each followed by the same consistency chain.
// The final image is the FBP of the restored sinogram.
ReconResult reconstruct(const Sinogram& y, const std::vector<double>& weights,
                        const ScoreNet& net, const ReconConfig& cfg,
                        const ReconContext& ctx);

}  // namespace osdm
