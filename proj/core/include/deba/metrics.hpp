#pragma once

#include <span>
#include <string>
#include <vector>

#include "deba/image.hpp"

namespace deba {

// All metrics compare images on the 0..255 level scale after 8-bit
// quantization, with MAX = 255 in the PSNR formula and the SSIM
// stabilizers c1 = (0.01 * 255)^2, c2 = (0.03 * 255)^2.
inline constexpr double kPixelMax = 255.0;
inline constexpr double kSsimC1 = (0.01 * 255.0) * (0.01 * 255.0);
inline constexpr double kSsimC2 = (0.03 * 255.0) * (0.03 * 255.0);

struct ChannelMetrics {
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  double mse = 0.0;
  double psnr_db = 0.0;  // +infinity when mse == 0
  double ssim = 0.0;
  std::vector<ChannelMetrics> per_channel;
};

double mse(const ImageTensor& a, const ImageTensor& b);
double psnr(const ImageTensor& a, const ImageTensor& b);

// Global-statistics SSIM: means, variances (N-1 denominator) and
// covariance over the whole plane, averaged across channels. Windowed
// SSIM would give different absolute values; this is the whole-plane
// form. Single-pixel images are rejected (variance undefined).
double ssim(const ImageTensor& a, const ImageTensor& b);

MetricReport compare(const ImageTensor& a, const ImageTensor& b);

// Dataset-level arithmetic means. Pairs with infinite PSNR are counted
// in n_infinite_psnr and excluded from the PSNR mean (the mean is
// +infinity if every pair is identical).
struct AggregateReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  int n_pairs = 0;
  int n_infinite_psnr = 0;
};

AggregateReport summarize(std::span<const MetricReport> reports);

// Plain-text table / machine-readable JSON renderings. PSNR serializes
// as the string "inf" when infinite (JSON has no infinity literal).
std::string to_text(const AggregateReport& report);
std::string to_json_string(const AggregateReport& report);

}  // namespace deba
