#include "deba/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "deba/errors.hpp"

namespace deba {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const ImageTensor& a, const ImageTensor& b) {
  validate(a);
  validate(b);
  if (!same_shape(a, b)) throw InvalidInput("metrics: image shapes differ");
}

// Plane values on the 0..255 level scale.
std::vector<double> levels(const RealMatrix& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = static_cast<double>(to_byte(p.data()[i]));
  }
  return out;
}

double plane_mse(const RealMatrix& a, const RealMatrix& b) {
  const auto xa = levels(a);
  const auto xb = levels(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    const double d = xa[i] - xb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(xa.size());
}

double mse_to_psnr(double m) {
  if (m == 0.0) return kInf;
  return 10.0 * std::log10(kPixelMax * kPixelMax / m);
}

double plane_ssim(const RealMatrix& a, const RealMatrix& b) {
  const auto x = levels(a);
  const auto y = levels(b);
  const std::size_t n = x.size();
  if (n < 2) throw InvalidInput("ssim: image must have more than one pixel");

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double var_x = 0.0, var_y = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    var_x += dx * dx;
    var_y += dy * dy;
    cov += dx * dy;
  }
  const double denom = static_cast<double>(n - 1);
  var_x /= denom;
  var_y /= denom;
  cov /= denom;

  return ((2.0 * mean_x * mean_y + kSsimC1) * (2.0 * cov + kSsimC2)) /
         ((mean_x * mean_x + mean_y * mean_y + kSsimC1) *
          (var_x + var_y + kSsimC2));
}

}  // namespace

double mse(const ImageTensor& a, const ImageTensor& b) {
  check_pair(a, b);
  double acc = 0.0;
  for (std::size_t c = 0; c < a.planes.size(); ++c) {
    acc += plane_mse(a.planes[c], b.planes[c]);
  }
  return acc / static_cast<double>(a.planes.size());
}

double psnr(const ImageTensor& a, const ImageTensor& b) {
  return mse_to_psnr(mse(a, b));
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
  check_pair(a, b);
  double acc = 0.0;
  for (std::size_t c = 0; c < a.planes.size(); ++c) {
    acc += plane_ssim(a.planes[c], b.planes[c]);
  }
  return acc / static_cast<double>(a.planes.size());
}

MetricReport compare(const ImageTensor& a, const ImageTensor& b) {
  check_pair(a, b);
  MetricReport r;
  for (std::size_t c = 0; c < a.planes.size(); ++c) {
    ChannelMetrics ch;
    ch.mse = plane_mse(a.planes[c], b.planes[c]);
    ch.psnr_db = mse_to_psnr(ch.mse);
    ch.ssim = plane_ssim(a.planes[c], b.planes[c]);
    r.per_channel.push_back(ch);
    r.mse += ch.mse;
    r.ssim += ch.ssim;
  }
  const auto n = static_cast<double>(a.planes.size());
  r.mse /= n;
  r.ssim /= n;
  r.psnr_db = mse_to_psnr(r.mse);
  return r;
}

AggregateReport summarize(std::span<const MetricReport> reports) {
  if (reports.empty()) throw InvalidInput("summarize: no metric reports");
  AggregateReport agg;
  agg.n_pairs = static_cast<int>(reports.size());
  double psnr_sum = 0.0;
  int psnr_finite = 0;
  for (const auto& r : reports) {
    agg.mse += r.mse;
    agg.ssim += r.ssim;
    if (std::isinf(r.psnr_db)) {
      ++agg.n_infinite_psnr;
    } else {
      psnr_sum += r.psnr_db;
      ++psnr_finite;
    }
  }
  agg.mse /= agg.n_pairs;
  agg.ssim /= agg.n_pairs;
  agg.psnr_db = psnr_finite > 0 ? psnr_sum / psnr_finite : kInf;
  return agg;
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_fixed(double v) {
  if (std::isinf(v)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string to_text(const AggregateReport& report) {
  std::string out;
  out += "metric      value\n";
  out += "mse         " + format_fixed(report.mse) + "\n";
  out += "psnr_db     " + format_fixed(report.psnr_db) + "\n";
  out += "ssim        " + format_fixed(report.ssim) + "\n";
  out += "n_pairs     " + std::to_string(report.n_pairs) + "\n";
  out += "n_inf_psnr  " + std::to_string(report.n_infinite_psnr) + "\n";
  return out;
}

std::string to_json_string(const AggregateReport& report) {
  std::string out = "{";
  out += "\"mse\":" + format_double(report.mse) + ",";
  out += "\"psnr_db\":";
  out += std::isinf(report.psnr_db) ? "\"inf\""
                                    : format_double(report.psnr_db);
  out += ",";
  out += "\"ssim\":" + format_double(report.ssim) + ",";
  out += "\"n_pairs\":" + std::to_string(report.n_pairs) + ",";
  out += "\"n_infinite_psnr\":" + std::to_string(report.n_infinite_psnr);
  out += "}";
  return out;
}

}  // namespace deba
