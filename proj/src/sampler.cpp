#include "osdm/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "osdm/metrics.hpp"
#include "osdm/simd.hpp"
#include "osdm/tv.hpp"

namespace osdm {

namespace {

std::vector<int> window_positions(int extent, int window, int stride) {
  std::vector<int> pos;
  for (int i = 0; i + window <= extent; i += stride) pos.push_back(i);
  if (pos.empty() || pos.back() != extent - window)
    pos.push_back(extent - window);  // clamp so the boundary is covered
  return pos;
}

}  // namespace

std::vector<double> sinogram_score(const ScoreNet& net,
                                   const std::vector<double>& x, int rows,
                                   int cols, double sigma,
                                   const ReconConfig& cfg) {
  const int a = cfg.hankel_window;
  const int a2 = a * a;
  auto pr = window_positions(rows, a, cfg.score_stride);
  auto pc = window_positions(cols, a, cfg.score_stride);

  std::vector<std::pair<int, int>> positions;
  positions.reserve(pr.size() * pc.size());
  for (int i : pr)
    for (int j : pc) positions.emplace_back(i, j);

  std::vector<double> field(x.size(), 0.0), count(x.size(), 0.0);
  std::vector<double> patch(std::size_t(a2) * a2);

  const std::size_t n_pos = positions.size();
  for (std::size_t base = 0; base < n_pos; base += a2) {
    const std::size_t take = std::min<std::size_t>(a2, n_pos - base);
    std::fill(patch.begin(), patch.end(), 0.0);
    for (std::size_t r = 0; r < take; ++r) {
      auto [pi, pj] = positions[base + r];
      for (int u = 0; u < a; ++u)
        for (int v = 0; v < a; ++v)
          patch[r * a2 + std::size_t(u * a + v)] =
              x[std::size_t(pi + u) * cols + (pj + v)];
    }
    std::vector<double> out = score(net, patch, a2, a2, sigma);
    for (std::size_t r = 0; r < take; ++r) {
      auto [pi, pj] = positions[base + r];
      for (int u = 0; u < a; ++u)
        for (int v = 0; v < a; ++v) {
          std::size_t p = std::size_t(pi + u) * cols + (pj + v);
          field[p] += out[r * a2 + std::size_t(u * a + v)];
          count[p] += 1.0;
        }
    }
  }
  for (std::size_t p = 0; p < field.size(); ++p)
    if (count[p] > 0.0) field[p] /= count[p];
  return field;
}

void predictor_step(SamplerState& state, const ScoreNet& net,
                    const ReconConfig& cfg, int level) {
  const auto& sch = cfg.schedule;
  double s_hi = sch.sigma(level + 1);
  double s_lo = sch.sigma_for_predictor(level);
  double coeff = s_hi * s_hi - s_lo * s_lo;
  if (coeff <= 0.0) return;  // degenerate schedule step
  std::vector<double> s =
      sinogram_score(net, state.x, state.rows, state.cols, s_hi, cfg);
  double noise_std = std::sqrt(coeff);
  for (std::size_t i = 0; i < state.x.size(); ++i)
    state.x[i] += coeff * s[i] + noise_std * state.rng.normal();
}

void corrector_step(SamplerState& state, const ScoreNet& net,
                    const ReconConfig& cfg, int level) {
  double sigma = cfg.schedule.sigma(std::max(level, 0));
  std::vector<double> s =
      sinogram_score(net, state.x, state.rows, state.cols, sigma, cfg);
  std::vector<double> z(state.x.size());
  for (auto& v : z) v = state.rng.normal();
  double s_norm = std::sqrt(simd::sumsq(s.data(), s.size()));
  if (s_norm == 0.0) return;  // step size undefined
  double z_norm = std::sqrt(simd::sumsq(z.data(), z.size()));
  double ratio = cfg.corrector_snr * z_norm / s_norm;
  double eps = 2.0 * ratio * ratio;
  double noise_std = std::sqrt(2.0 * eps);
  for (std::size_t i = 0; i < state.x.size(); ++i)
    state.x[i] += eps * s[i] + noise_std * z[i];
}

std::vector<double> lr_step(const std::vector<double>& x, int rows, int cols,
                            int window, int rank) {
  return hankel_inverse(
      svd_hard_threshold(hankel_transform(x, rows, cols, window), rank));
}

std::vector<double> pwls_step(const std::vector<double>& y,
                              const std::vector<double>& weights,
                              const std::vector<double>& prior, double mu) {
  if (y.size() != weights.size() || y.size() != prior.size())
    throw ConfigError("pwls_step: shape mismatch");
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double w = weights[i];
    if (!(w > 0.0)) throw ConfigError("pwls_step: weights must be positive");
    // mu = 0 returns the data bit-exactly ((w*y)/w would round).
    out[i] = (mu == 0.0) ? y[i] : (w * y[i] + mu * prior[i]) / (w + mu);
  }
  return out;
}

std::vector<double> tv_step(const std::vector<double>& x, int rows, int cols,
                            double alpha, const std::vector<double>& x_prev) {
  if (!(alpha > 0.0)) throw ConfigError("tv_step: alpha must be > 0");
  std::vector<double> g = tv_gradient(x, rows, cols);
  double g_norm = std::sqrt(simd::sumsq(g.data(), g.size()));
  if (g_norm == 0.0) return x;
  simd::scale(g.data(), 1.0 / g_norm, g.size());

  std::vector<double> diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - x_prev[i];
  double dx = std::sqrt(simd::sumsq(diff.data(), diff.size()));
  if (dx == 0.0) return x;

  double tv0 = tv_value(x, rows, cols);
  double step = alpha * dx;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    std::vector<double> cand = x;
    simd::axpy(cand.data(), -step, g.data(), cand.size());
    if (tv_value(cand, rows, cols) <= tv0) return cand;
    step *= 0.5;
  }
  return x;  // overshoot even after halving: leave x unchanged
}

ReconResult reconstruct(const Sinogram& y, const std::vector<double>& weights,
                        const ScoreNet& net, const ReconConfig& cfg,
                        const ReconContext& ctx) {
  cfg.validate();
  ctx.geom.validate();
  if (weights.size() != y.size())
    throw ConfigError("reconstruct: weight array shape mismatch");

  const int rows = y.n_views, cols = y.n_detectors;
  const double norm = net.norm_factor;
  if (!(norm > 0.0)) throw ConfigError("reconstruct: bad normalization factor");

  std::vector<double> y_norm(y.values);
  simd::scale(y_norm.data(), 1.0 / norm, y_norm.size());

  // mu is a dimensionless balance weight; scale the statistical weights to
  // max 1 so the default holds across dose levels, and clamp them from
  // below so deeply attenuated rays still converge to the data from a
  // noise initialization (their relative weight would otherwise be
  // exp(-y_max/eta), vanishingly small).
  constexpr double kWeightFloor = 1e-2;
  double w_max = *std::max_element(weights.begin(), weights.end());
  if (!(w_max > 0.0)) throw ConfigError("reconstruct: weights must be positive");
  std::vector<double> w_rel(weights);
  simd::scale(w_rel.data(), 1.0 / w_max, w_rel.size());
  for (auto& w : w_rel) w = std::max(w, kWeightFloor);

  SamplerState state;
  state.rows = rows;
  state.cols = cols;
  state.rng = Rng(splitmix64(cfg.rng_seed ^ 0x73616D70ULL));
  state.x.assign(y_norm.size(), 0.0);
  if (cfg.enable_diffusion) {
    for (auto& v : state.x) v = cfg.schedule.sigma_max * state.rng.normal();
  } else {
    state.x = y_norm;
  }

  auto consistency = [&](std::vector<double>& x) {
    std::vector<double> before = x;
    if (cfg.enable_lr) x = lr_step(x, rows, cols, cfg.hankel_window, cfg.rank);
    if (cfg.enable_pwls) x = pwls_step(y_norm, w_rel, x, cfg.pwls_mu);
    if (cfg.enable_tv) x = tv_step(x, rows, cols, cfg.tv_alpha, before);
  };

  ReconResult result;
  result.trace.reserve(cfg.outer_steps);

  for (int i = cfg.outer_steps - 1; i >= 0; --i) {
    state.step = i;
    if (cfg.enable_diffusion) predictor_step(state, net, cfg, i);
    consistency(state.x);
    for (int j = 0; j < cfg.inner_steps; ++j) {
      if (cfg.enable_diffusion) corrector_step(state, net, cfg, i);
      consistency(state.x);
    }
    for (double v : state.x)
      if (!std::isfinite(v))
        throw NumericalError("reconstruct: non-finite state at outer step " +
                             std::to_string(i));

    TraceRow row;
    row.step = i;
    row.sigma = cfg.schedule.sigma(i);
    double fid = 0.0;
    for (std::size_t k = 0; k < state.x.size(); ++k) {
      double d = state.x[k] - y_norm[k];
      fid += w_rel[k] * d * d;
    }
    row.data_fidelity = std::sqrt(fid);
    row.tv = tv_value(state.x, rows, cols);
    if (ctx.reference) {
      Sinogram xs(rows, cols, y.scale);
      xs.values = state.x;
      simd::scale(xs.values.data(), norm, xs.values.size());
      row.psnr = psnr(xs.values, ctx.reference->values);
    } else {
      row.psnr = std::nan("");
    }
    result.trace.push_back(row);
  }

  result.sinogram = Sinogram(rows, cols, y.scale);
  result.sinogram.values = state.x;
  simd::scale(result.sinogram.values.data(), norm,
              result.sinogram.values.size());

  // FBP consumes raw attenuation-length values.
  Sinogram att(rows, cols, 1.0);
  att.values = result.sinogram.values;
  simd::scale(att.values.data(), 1.0 / y.scale, att.values.size());
  result.image = fbp(att, ctx.geom, ctx.filter, ctx.image_width,
                     ctx.image_height, ctx.pixel_size);
  return result;
}

}  // namespace osdm
