#include "osdm/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace osdm {

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw ConfigError("mse: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / double(a.size());
}

double psnr(const std::vector<double>& test, const std::vector<double>& ref,
            bool literal_norm) {
  if (test.size() != ref.size() || test.empty())
    throw ConfigError("psnr: shape mismatch");
  double peak = *std::max_element(ref.begin(), ref.end());
  double err2 = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    double d = test[i] - ref[i];
    err2 += d * d;
  }
  if (err2 == 0.0) return kPsnrCap;
  double denom = literal_norm ? std::sqrt(err2)
                              : std::sqrt(err2 / double(test.size()));
  double value = 20.0 * std::log10(peak / denom);
  return std::min(value, kPsnrCap);
}

namespace {

std::vector<double> gaussian_window(int half, double sigma) {
  int n = 2 * half + 1;
  std::vector<double> w(std::size_t(n) * n);
  double total = 0.0;
  for (int r = -half; r <= half; ++r)
    for (int c = -half; c <= half; ++c) {
      double v = std::exp(-(r * r + c * c) / (2.0 * sigma * sigma));
      w[std::size_t(r + half) * n + (c + half)] = v;
      total += v;
    }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

double ssim(const std::vector<double>& a, const std::vector<double>& b,
            int rows, int cols, double data_range) {
  if (a.size() != b.size() || a.size() != std::size_t(rows) * cols)
    throw ConfigError("ssim: shape mismatch");
  if (!(data_range > 0.0)) throw ConfigError("ssim: data_range must be > 0");

  const int half = 5;
  static const std::vector<double> win = gaussian_window(half, 1.5);
  const int n = 2 * half + 1;
  const double c1 = (0.01 * data_range) * (0.01 * data_range);
  const double c2 = (0.03 * data_range) * (0.03 * data_range);

  double acc = 0.0;
  std::size_t count = 0;
  for (int r = half; r < rows - half; ++r)
    for (int c = half; c < cols - half; ++c) {
      double mu_a = 0.0, mu_b = 0.0;
      for (int i = -half; i <= half; ++i)
        for (int j = -half; j <= half; ++j) {
          double w = win[std::size_t(i + half) * n + (j + half)];
          mu_a += w * a[std::size_t(r + i) * cols + (c + j)];
          mu_b += w * b[std::size_t(r + i) * cols + (c + j)];
        }
      double va = 0.0, vb = 0.0, cov = 0.0;
      for (int i = -half; i <= half; ++i)
        for (int j = -half; j <= half; ++j) {
          double w = win[std::size_t(i + half) * n + (j + half)];
          double da = a[std::size_t(r + i) * cols + (c + j)] - mu_a;
          double db = b[std::size_t(r + i) * cols + (c + j)] - mu_b;
          va += w * da * da;
          vb += w * db * db;
          cov += w * da * db;
        }
      double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
      double den = (mu_a * mu_a + mu_b * mu_b + c1) * (va + vb + c2);
      acc += num / den;
      ++count;
    }
  if (count == 0) throw ConfigError("ssim: image smaller than the window");
  return acc / double(count);
}

MetricReport evaluate(const std::vector<double>& test,
                      const std::vector<double>& ref, int rows, int cols,
                      double data_range) {
  return {psnr(test, ref), ssim(test, ref, rows, cols, data_range),
          mse(test, ref)};
}

}  // namespace osdm
