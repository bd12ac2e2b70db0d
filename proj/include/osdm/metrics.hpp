#pragma once

#include <vector>

#include "osdm/types.hpp"

namespace osdm {

inline constexpr double kPsnrCap = 99.99;

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  double mse = 0.0;
};

double mse(const std::vector<double>& a, const std::vector<double>& b);

// 20*log10(max(ref)/RMSE), capped at 99.99 dB for identical inputs.
// literal_norm = true uses the unnormalized L2 norm of the difference in
// the denominator instead of the RMSE.
double psnr(const std::vector<double>& test, const std::vector<double>& ref,
            bool literal_norm = false);

// Mean local SSIM over 11x11 Gaussian windows (sigma = 1.5),
// c1 = (0.01 L)^2, c2 = (0.03 L)^2.
double ssim(const std::vector<double>& a, const std::vector<double>& b,
            int rows, int cols, double data_range);

MetricReport evaluate(const std::vector<double>& test,
                      const std::vector<double>& ref, int rows, int cols,
                      double data_range);

}  // namespace osdm
