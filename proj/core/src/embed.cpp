#include "deba/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "deba/colorspace.hpp"
#include "deba/errors.hpp"
#include "deba/hash.hpp"
#include "deba/svd.hpp"

namespace deba {

const char* to_string(Variant v) {
  return v == Variant::kRgb ? "RGB" : "UV";
}

Variant variant_from_string(const std::string& s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "rgb") return Variant::kRgb;
  if (lower == "uv") return Variant::kUv;
  throw InvalidInput("unknown variant '" + s + "' (expected rgb or uv)");
}

std::string PoisonConfig::canonical_string() const {
  char rate_buf[32];
  std::snprintf(rate_buf, sizeof(rate_buf), "%.17g", poison_rate);
  std::string s = "deba-config-v1";
  s += "|variant=";
  s += to_string(variant);
  s += "|k=" + std::to_string(k);
  s += "|target=" + std::to_string(target_label);
  s += "|rate=";
  s += rate_buf;
  s += "|seed=" + std::to_string(seed);
  s += "|trigger=" + trigger_source;
  return s;
}

std::uint64_t PoisonConfig::hash() const { return fnv1a64(canonical_string()); }

void validate(const PoisonConfig& cfg) {
  if (cfg.k < 0) throw InvalidInput("config: k must be nonnegative");
  if (!(cfg.poison_rate >= 0.0 && cfg.poison_rate <= 1.0))
    throw InvalidInput("config: poison rate must lie in [0, 1]");
  if (cfg.target_label < 0)
    throw InvalidInput("config: target label must be nonnegative");
}

int default_k(Variant variant, int min_dim) {
  if (min_dim < 1) throw InvalidInput("default_k: image dimension must be >= 1");
  struct Entry { int dim, rgb, uv; };
  static constexpr Entry kTable[] = {{32, 16, 26}, {64, 33, 41}, {224, 163, 207}};
  for (const auto& e : kTable) {
    if (e.dim == min_dim) return variant == Variant::kRgb ? e.rgb : e.uv;
  }
  const double base = variant == Variant::kRgb ? 16.0 : 26.0;
  const int k = static_cast<int>(std::lround(base * min_dim / 32.0));
  return std::clamp(k, 1, min_dim);
}

ImageTensor prepare_trigger(const ImageTensor& trigger, int target_h,
                            int target_w) {
  validate(trigger);
  if (trigger.channels() != 3)
    throw InvalidInput("prepare_trigger: trigger must have 3 channels");
  if (target_h < 1 || target_w < 1)
    throw InvalidInput("prepare_trigger: zero-area target");

  const int in_h = trigger.height();
  const int in_w = trigger.width();
  if (in_h == target_h && in_w == target_w) return trigger;

  ImageTensor out;
  out.space = trigger.space;
  out.planes.assign(3, RealMatrix(target_h, target_w));

  const double sy = static_cast<double>(in_h) / target_h;
  const double sx = static_cast<double>(in_w) / target_w;
  for (int c = 0; c < 3; ++c) {
    const RealMatrix& src = trigger.planes[static_cast<std::size_t>(c)];
    RealMatrix& dst = out.planes[static_cast<std::size_t>(c)];
    for (int y = 0; y < target_h; ++y) {
      double fy = (y + 0.5) * sy - 0.5;
      fy = std::clamp(fy, 0.0, static_cast<double>(in_h - 1));
      const int y0 = static_cast<int>(fy);
      const int y1 = std::min(y0 + 1, in_h - 1);
      const double wy = fy - y0;
      for (int x = 0; x < target_w; ++x) {
        double fx = (x + 0.5) * sx - 0.5;
        fx = std::clamp(fx, 0.0, static_cast<double>(in_w - 1));
        const int x0 = static_cast<int>(fx);
        const int x1 = std::min(x0 + 1, in_w - 1);
        const double wx = fx - x0;
        dst(y, x) = (1 - wy) * ((1 - wx) * src(y0, x0) + wx * src(y0, x1)) +
                    wy * ((1 - wx) * src(y1, x0) + wx * src(y1, x1));
      }
    }
  }
  return out;
}

namespace {

// Splice-and-reconstruct of a single plane pair.
RealMatrix splice_plane(const RealMatrix& clean, const RealMatrix& trigger,
                        int k) {
  return reconstruct(splice_tail(decompose(clean), decompose(trigger), k));
}

void check_k(const ImageTensor& clean, int k) {
  if (k > std::min(clean.height(), clean.width()))
    throw KTooLarge("embed: k exceeds min(height, width) = " +
                    std::to_string(std::min(clean.height(), clean.width())));
}

}  // namespace

ImageTensor embed_rgb_raw(const ImageTensor& clean, const ImageTensor& trigger,
                          const PoisonConfig& cfg) {
  validate(clean);
  validate(cfg);
  if (cfg.variant != Variant::kRgb)
    throw InvalidInput("embed_rgb: config variant is not RGB");
  if (clean.space == ColorSpace::kYuv)
    throw InvalidInput("embed_rgb: clean image must be RGB or GRAY");
  check_k(clean, cfg.k);

  ImageTensor prepared = prepare_trigger(trigger, clean.height(), clean.width());
  if (clean.space == ColorSpace::kGray) prepared = rgb_to_gray(prepared);

  ImageTensor out;
  out.space = clean.space;
  out.planes.reserve(clean.planes.size());
  for (std::size_t c = 0; c < clean.planes.size(); ++c) {
    out.planes.push_back(splice_plane(clean.planes[c], prepared.planes[c], cfg.k));
  }
  return out;
}

ImageTensor embed_rgb(const ImageTensor& clean, const ImageTensor& trigger,
                      const PoisonConfig& cfg) {
  return quantize(embed_rgb_raw(clean, trigger, cfg));
}

ImageTensor embed_uv_raw(const ImageTensor& clean, const ImageTensor& trigger,
                         const PoisonConfig& cfg) {
  validate(clean);
  validate(cfg);
  if (cfg.variant != Variant::kUv)
    throw InvalidInput("embed_uv: config variant is not UV");
  if (clean.space != ColorSpace::kRgb)
    throw InvalidInput("embed_uv: clean image must be a 3-channel RGB image");
  check_k(clean, cfg.k);

  const ImageTensor prepared =
      prepare_trigger(trigger, clean.height(), clean.width());
  const ImageTensor clean_yuv = rgb_to_yuv(clean);
  const ImageTensor trigger_yuv = rgb_to_yuv(prepared);

  ImageTensor poisoned_yuv;
  poisoned_yuv.space = ColorSpace::kYuv;
  poisoned_yuv.planes.push_back(clean_yuv.planes[0]);  // luma untouched
  poisoned_yuv.planes.push_back(
      splice_plane(clean_yuv.planes[1], trigger_yuv.planes[1], cfg.k));
  poisoned_yuv.planes.push_back(
      splice_plane(clean_yuv.planes[2], trigger_yuv.planes[2], cfg.k));

  return yuv_to_rgb(poisoned_yuv);
}

ImageTensor embed_uv(const ImageTensor& clean, const ImageTensor& trigger,
                     const PoisonConfig& cfg) {
  return quantize(embed_uv_raw(clean, trigger, cfg));
}

ImageTensor embed(const ImageTensor& clean, const ImageTensor& trigger,
                  const PoisonConfig& cfg) {
  return cfg.variant == Variant::kRgb ? embed_rgb(clean, trigger, cfg)
                                      : embed_uv(clean, trigger, cfg);
}

ImageTensor residual(const ImageTensor& clean, const ImageTensor& poisoned) {
  validate(clean);
  validate(poisoned);
  if (!same_shape(clean, poisoned) || clean.space != poisoned.space)
    throw InvalidInput("residual: images must share shape and color space");

  ImageTensor out = clean;
  double peak = 0.0;
  for (std::size_t c = 0; c < out.planes.size(); ++c) {
    for (std::size_t i = 0; i < out.planes[c].size(); ++i) {
      const double d =
          std::fabs(clean.planes[c].data()[i] - poisoned.planes[c].data()[i]);
      out.planes[c].data()[i] = d;
      peak = std::max(peak, d);
    }
  }
  if (peak > 0.0) {
    for (auto& p : out.planes) {
      for (std::size_t i = 0; i < p.size(); ++i) p.data()[i] /= peak;
    }
  }
  return out;
}

}  // namespace deba
