#include "osdm/scorenet.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>

#include "osdm/simd.hpp"

namespace osdm {

namespace {

constexpr const char* kArchTag = "osdm-scorenet/conv3x3x4/smoothsat/lnsigma";

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Zero-padded copy with a one-pixel border.
void pad_channel(const double* src, int rows, int cols, double* dst) {
  const int pc = cols + 2;
  std::memset(dst, 0, sizeof(double) * std::size_t(rows + 2) * pc);
  for (int r = 0; r < rows; ++r)
    std::memcpy(dst + std::size_t(r + 1) * pc + 1, src + std::size_t(r) * cols,
                sizeof(double) * cols);
}

struct LayerCache {
  std::vector<std::vector<double>> padded_in;  // per in channel, (H+2)x(W+2)
  std::vector<std::vector<double>> preact;     // per out channel, HxW
};

void conv_forward(const ConvLayer& layer, const LayerCache& cache, int rows,
                  int cols, std::vector<std::vector<double>>& out) {
  const int pc = cols + 2;
  out.assign(std::size_t(layer.out_ch), {});
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    auto& z = out[oc];
    z.assign(std::size_t(rows) * cols, layer.b[oc]);
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const double* pin = cache.padded_in[ic].data();
      const double* w = layer.weights(oc, ic);
      for (int y = 0; y < rows; ++y)
        simd::conv3x3_row(z.data() + std::size_t(y) * cols,
                          pin + std::size_t(y) * pc,
                          pin + std::size_t(y + 1) * pc,
                          pin + std::size_t(y + 2) * pc, w, std::size_t(cols));
    }
  }
}

// Accumulates parameter gradients and returns the gradient w.r.t. the
// layer input (unpadded).
void conv_backward(const ConvLayer& layer, const LayerCache& cache, int rows,
                   int cols, const std::vector<std::vector<double>>& gout,
                   ConvLayer& grads, std::vector<std::vector<double>>& gin) {
  const int pc = cols + 2;
  // Parameter gradients
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    const auto& go = gout[oc];
    grads.b[oc] += simd::sum(go.data(), go.size());
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const double* pin = cache.padded_in[ic].data();
      double* gw = grads.weights(oc, ic);
      for (int y = 0; y < rows; ++y) {
        const double* grow = go.data() + std::size_t(y) * cols;
        for (int k = 0; k < 3; ++k) {
          const double* prow = pin + std::size_t(y + k) * pc;
          for (int j = 0; j < 3; ++j)
            gw[3 * k + j] += simd::dot(grow, prow + j, std::size_t(cols));
        }
      }
    }
  }
  // Input gradients: correlation with the flipped kernels over padded gout.
  gin.assign(std::size_t(layer.in_ch), {});
  std::vector<double> pgo(std::size_t(rows + 2) * pc);
  for (int ic = 0; ic < layer.in_ch; ++ic)
    gin[ic].assign(std::size_t(rows) * cols, 0.0);
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    pad_channel(gout[oc].data(), rows, cols, pgo.data());
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const double* w = layer.weights(oc, ic);
      double wf[9];
      for (int k = 0; k < 9; ++k) wf[k] = w[8 - k];
      auto& g = gin[ic];
      for (int y = 0; y < rows; ++y)
        simd::conv3x3_row(g.data() + std::size_t(y) * cols,
                          pgo.data() + std::size_t(y) * pc,
                          pgo.data() + std::size_t(y + 1) * pc,
                          pgo.data() + std::size_t(y + 2) * pc, wf,
                          std::size_t(cols));
    }
  }
}

struct ForwardCache {
  std::array<LayerCache, ScoreNet::kLayers> layer;
  std::vector<double> output;  // HxW
};

void run_forward(const ScoreNet& net, const std::vector<double>& x, int rows,
                 int cols, double sigma, ForwardCache& fc) {
  if (x.size() != std::size_t(rows) * cols)
    throw ConfigError("scorenet: patch size mismatch");
  const std::size_t padded = std::size_t(rows + 2) * (cols + 2);

  std::vector<std::vector<double>> act(2);
  act[0] = x;
  act[1].assign(std::size_t(rows) * cols, std::log(sigma));

  for (int l = 0; l < ScoreNet::kLayers; ++l) {
    const ConvLayer& layer = net.layers()[l];
    LayerCache& cache = fc.layer[l];
    cache.padded_in.assign(std::size_t(layer.in_ch), std::vector<double>(padded));
    for (int ic = 0; ic < layer.in_ch; ++ic)
      pad_channel(act[ic].data(), rows, cols, cache.padded_in[ic].data());
    conv_forward(layer, cache, rows, cols, cache.preact);
    if (l + 1 < ScoreNet::kLayers) {
      act.assign(std::size_t(layer.out_ch), {});
      for (int oc = 0; oc < layer.out_ch; ++oc) {
        act[oc].assign(std::size_t(rows) * cols, 0.0);
        simd::smoothsat(act[oc].data(), cache.preact[oc].data(),
                        act[oc].size());
      }
    }
  }
  fc.output = fc.layer[ScoreNet::kLayers - 1].preact[0];
}

void backprop(const ScoreNet& net, const ForwardCache& fc, int rows, int cols,
              const std::vector<double>& gout_final, NetGrads& grads) {
  std::vector<std::vector<double>> gout(1);
  gout[0] = gout_final;
  for (int l = ScoreNet::kLayers - 1; l >= 0; --l) {
    const ConvLayer& layer = net.layers()[l];
    const LayerCache& cache = fc.layer[l];
    std::vector<std::vector<double>> gin;
    conv_backward(layer, cache, rows, cols, gout, grads.layers[l], gin);
    if (l > 0) {
      // Through the activation of the previous layer's output.
      const LayerCache& prev = fc.layer[l - 1];
      gout.assign(gin.size(), {});
      for (std::size_t c = 0; c < gin.size(); ++c) {
        gout[c].assign(gin[c].size(), 0.0);
        simd::smoothsat_grad(gout[c].data(), gin[c].data(),
                             prev.preact[c].data(), gin[c].size());
      }
    }
  }
}

void for_each_param(std::array<ConvLayer, ScoreNet::kLayers>& layers,
                    const std::function<void(std::vector<double>&)>& fn) {
  for (auto& l : layers) {
    fn(l.w);
    fn(l.b);
  }
}

}  // namespace

double SigmaSchedule::sigma(int i) const {
  validate();
  double ratio = sigma_min / sigma_max;
  return sigma_max * std::pow(ratio, double(n_levels - i) / double(n_levels));
}

ScoreNet::ScoreNet(int hidden_channels, std::uint64_t init_seed)
    : hidden_(hidden_channels) {
  if (hidden_channels < 1) throw ConfigError("scorenet: hidden channels < 1");
  const int chans[kLayers + 1] = {2, hidden_, hidden_, hidden_, 1};
  Rng rng(splitmix64(init_seed ^ 0x5C0FEFE7ULL));
  for (int l = 0; l < kLayers; ++l) {
    ConvLayer& layer = layers_[l];
    layer.in_ch = chans[l];
    layer.out_ch = chans[l + 1];
    layer.w.assign(std::size_t(layer.in_ch) * layer.out_ch * 9, 0.0);
    layer.b.assign(std::size_t(layer.out_ch), 0.0);
    if (l + 1 < kLayers) {
      double std_dev = std::sqrt(2.0 / (9.0 * layer.in_ch));  // fan-in
      for (auto& v : layer.w) v = std_dev * rng.normal();
    }
    // Final layer stays zero: the fresh net predicts zero noise.
  }
}

std::uint64_t ScoreNet::architecture_hash() const {
  std::uint64_t h = fnv1a(kArchTag, std::strlen(kArchTag), 0xCBF29CE484222325ULL);
  h = fnv1a(&hidden_, sizeof hidden_, h);
  for (const auto& l : layers_) {
    h = fnv1a(&l.in_ch, sizeof l.in_ch, h);
    h = fnv1a(&l.out_ch, sizeof l.out_ch, h);
  }
  return h;
}

std::size_t ScoreNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

bool ScoreNet::finite() const {
  for (const auto& l : layers_) {
    for (double v : l.w)
      if (!std::isfinite(v)) return false;
    for (double v : l.b)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<double> ScoreNet::forward(const std::vector<double>& x, int rows,
                                      int cols, double sigma) const {
  ForwardCache fc;
  run_forward(*this, x, rows, cols, sigma, fc);
  return fc.output;
}

NetGrads NetGrads::zeros_like(const ScoreNet& net) {
  NetGrads g;
  for (int l = 0; l < ScoreNet::kLayers; ++l) {
    const ConvLayer& src = net.layers()[l];
    g.layers[l].in_ch = src.in_ch;
    g.layers[l].out_ch = src.out_ch;
    g.layers[l].w.assign(src.w.size(), 0.0);
    g.layers[l].b.assign(src.b.size(), 0.0);
  }
  return g;
}

void NetGrads::accumulate(const NetGrads& other, double factor) {
  for (int l = 0; l < ScoreNet::kLayers; ++l) {
    simd::axpy(layers[l].w.data(), factor, other.layers[l].w.data(),
               layers[l].w.size());
    simd::axpy(layers[l].b.data(), factor, other.layers[l].b.data(),
               layers[l].b.size());
  }
}

std::pair<std::vector<double>, std::vector<double>> perturb(
    const std::vector<double>& x0, double sigma, Rng& rng) {
  if (sigma < 0.0) throw ConfigError("perturb: sigma must be >= 0");
  std::vector<double> eps(x0.size()), xt(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    eps[i] = rng.normal();
    xt[i] = x0[i] + sigma * eps[i];
  }
  return {std::move(xt), std::move(eps)};
}

double dsm_loss(const ScoreNet& net, const std::vector<const double*>& batch,
                int patch_dim, const SigmaSchedule& schedule, Rng& rng,
                NetGrads* grads) {
  if (batch.empty()) throw ConfigError("dsm_loss: empty batch");
  const std::size_t n = std::size_t(patch_dim) * patch_dim;
  double total = 0.0;
  const double inv_b = 1.0 / double(batch.size());
  for (const double* p : batch) {
    int level = 1 + int(rng.below(std::uint64_t(schedule.n_levels)));
    double sigma = schedule.sigma(level);
    std::vector<double> x0(p, p + n);
    auto [xt, eps] = perturb(x0, sigma, rng);
    ForwardCache fc;
    run_forward(net, xt, patch_dim, patch_dim, sigma, fc);
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = fc.output[i] + eps[i];
    total += simd::sumsq(res.data(), n);
    if (grads) {
      simd::scale(res.data(), 2.0 * inv_b, n);
      backprop(net, fc, patch_dim, patch_dim, res, *grads);
    }
  }
  return total * inv_b;
}

TrainResult train(const PatchBatch& patches, const TrainConfig& config,
                  const SigmaSchedule& schedule, int hidden_channels,
                  const ScoreNet* resume_from) {
  config.validate();
  schedule.validate();
  if (patches.patches.empty()) throw ConfigError("train: no patches");
  const int patch_dim = patches.patch_dim;

  ScoreNet net = resume_from ? *resume_from
                             : ScoreNet(hidden_channels, config.rng_seed);
  net.schedule = schedule;
  ScoreNet ema = net;

  // Adam state, flattened over layer parameter arrays.
  std::vector<std::vector<double>> m, v;
  for_each_param(net.layers(), [&](std::vector<double>& p) {
    m.emplace_back(p.size(), 0.0);
    v.emplace_back(p.size(), 0.0);
  });

  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  Rng rng(splitmix64(config.rng_seed ^ 0x7261696EULL));

  TrainResult result;
  result.loss_history.reserve(config.n_iters);

  for (int it = 1; it <= config.n_iters; ++it) {
    std::vector<const double*> batch(config.batch_size);
    for (auto& b : batch)
      b = patches.patches[rng.below(patches.patches.size())].data();

    NetGrads grads = NetGrads::zeros_like(net);
    double loss = dsm_loss(net, batch, patch_dim, schedule, rng, &grads);
    if (!std::isfinite(loss))
      throw NumericalError("train: loss diverged at iteration " +
                           std::to_string(it));
    result.loss_history.push_back(loss);

    double bc1 = 1.0 - std::pow(beta1, it);
    double bc2 = 1.0 - std::pow(beta2, it);
    std::size_t slot = 0;
    std::vector<std::vector<double>*> gptrs;
    for_each_param(grads.layers,
                   [&](std::vector<double>& g) { gptrs.push_back(&g); });
    for_each_param(net.layers(), [&](std::vector<double>& p) {
      std::vector<double>& g = *gptrs[slot];
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[slot][i] = beta1 * m[slot][i] + (1.0 - beta1) * g[i];
        v[slot][i] = beta2 * v[slot][i] + (1.0 - beta2) * g[i] * g[i];
        double mh = m[slot][i] / bc1, vh = v[slot][i] / bc2;
        p[i] -= config.learning_rate * mh / (std::sqrt(vh) + adam_eps);
      }
      ++slot;
    });

    for (int l = 0; l < ScoreNet::kLayers; ++l) {
      auto& el = ema.layers()[l];
      const auto& nl = net.layers()[l];
      for (std::size_t i = 0; i < el.w.size(); ++i)
        el.w[i] = config.ema_decay * el.w[i] + (1.0 - config.ema_decay) * nl.w[i];
      for (std::size_t i = 0; i < el.b.size(); ++i)
        el.b[i] = config.ema_decay * el.b[i] + (1.0 - config.ema_decay) * nl.b[i];
    }
  }

  ema.schedule = schedule;
  ema.norm_factor = net.norm_factor;
  result.net = std::move(ema);
  return result;
}

std::vector<double> score(const ScoreNet& net, const std::vector<double>& x,
                          int rows, int cols, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("score: sigma must be > 0");
  std::vector<double> out = net.forward(x, rows, cols, sigma);
  simd::scale(out.data(), 1.0 / sigma, out.size());
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint format (little-endian):
//   "OSCK" u8 version | u64 arch_hash | i32 hidden | f64 norm_factor
//   f64 sigma_min | f64 sigma_max | i32 n_levels | u64 train_seed
//   per layer: i32 in, i32 out, f64 w[], f64 b[]
//   u32 crc32 of everything before it

namespace {

struct ByteSink {
  std::vector<unsigned char> bytes;
  template <class T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  void put_doubles(const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    bytes.insert(bytes.end(), p, p + v.size() * sizeof(double));
  }
};

struct ByteSource {
  const unsigned char* p;
  const unsigned char* end;
  template <class T>
  T get() {
    if (p + sizeof(T) > end) throw ConfigError("checkpoint: truncated file");
    T v;
    std::memcpy(&v, p, sizeof(T));
    p += sizeof(T);
    return v;
  }
  void get_doubles(std::vector<double>& v) {
    std::size_t bytes = v.size() * sizeof(double);
    if (p + bytes > end) throw ConfigError("checkpoint: truncated file");
    std::memcpy(v.data(), p, bytes);
    p += bytes;
  }
};

}  // namespace

void save_checkpoint(const std::string& path, const ScoreNet& net,
                     std::uint64_t train_seed) {
  ByteSink s;
  s.bytes = {'O', 'S', 'C', 'K'};
  s.put<std::uint8_t>(1);
  s.put<std::uint64_t>(net.architecture_hash());
  s.put<std::int32_t>(net.hidden_channels());
  s.put<double>(net.norm_factor);
  s.put<double>(net.schedule.sigma_min);
  s.put<double>(net.schedule.sigma_max);
  s.put<std::int32_t>(net.schedule.n_levels);
  s.put<std::uint64_t>(train_seed);
  for (const auto& l : net.layers()) {
    s.put<std::int32_t>(l.in_ch);
    s.put<std::int32_t>(l.out_ch);
    s.put_doubles(l.w);
    s.put_doubles(l.b);
  }
  std::uint32_t crc =
      std::uint32_t(crc32(0L, s.bytes.data(), uInt(s.bytes.size())));
  s.put<std::uint32_t>(crc);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("checkpoint: cannot open " + path);
  f.write(reinterpret_cast<const char*>(s.bytes.data()),
          std::streamsize(s.bytes.size()));
  if (!f) throw ConfigError("checkpoint: write failed for " + path);
}

ScoreNet load_checkpoint(const std::string& path, std::uint64_t* train_seed) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("checkpoint: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 9 || std::memcmp(bytes.data(), "OSCK", 4) != 0)
    throw ConfigError("checkpoint: bad magic in " + path);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  std::uint32_t computed = std::uint32_t(
      crc32(0L, bytes.data(), uInt(bytes.size() - 4)));
  if (stored != computed) throw ConfigError("checkpoint: CRC mismatch");

  ByteSource src{bytes.data() + 4, bytes.data() + bytes.size() - 4};
  auto version = src.get<std::uint8_t>();
  if (version != 1) throw ConfigError("checkpoint: unsupported version");
  auto arch_hash = src.get<std::uint64_t>();
  auto hidden = src.get<std::int32_t>();

  ScoreNet net(hidden, 0);
  net.norm_factor = src.get<double>();
  net.schedule.sigma_min = src.get<double>();
  net.schedule.sigma_max = src.get<double>();
  net.schedule.n_levels = src.get<std::int32_t>();
  auto seed = src.get<std::uint64_t>();
  if (train_seed) *train_seed = seed;
  for (auto& l : net.layers()) {
    auto in = src.get<std::int32_t>();
    auto out = src.get<std::int32_t>();
    if (in != l.in_ch || out != l.out_ch)
      throw ConfigError("checkpoint: layer shape mismatch");
    src.get_doubles(l.w);
    src.get_doubles(l.b);
  }
  if (net.architecture_hash() != arch_hash)
    throw ConfigError("checkpoint: architecture hash mismatch");
  return net;
}

}  // namespace osdm
