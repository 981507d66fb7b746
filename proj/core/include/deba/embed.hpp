#pragma once

#include <cstdint>
#include <string>

#include "deba/image.hpp"

namespace deba {

enum class Variant { kRgb, kUv };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);  // "rgb"/"uv", any case

// Attack parameters for one poisoning campaign. The canonical string is
// the serialization contract: its FNV-1a hash identifies the config in
// every manifest the campaign produces.
struct PoisonConfig {
  Variant variant = Variant::kRgb;
  int k = 16;                // tail triplets to replace
  int target_label = 0;      // y_t
  double poison_rate = 0.1;  // p in [0, 1]
  std::uint64_t seed = 0;
  std::string trigger_source;

  std::string canonical_string() const;
  std::uint64_t hash() const;

  friend bool operator==(const PoisonConfig&, const PoisonConfig&) = default;
};

// InvalidInput on k < 0, rate outside [0, 1], or negative target label.
void validate(const PoisonConfig& cfg);

// Per-image-size defaults for k, keyed by min(height, width):
// 32 -> 16 (RGB) / 26 (UV), 64 -> 33 / 41, 224 -> 163 / 207; other sizes
// scale the 32-pixel value proportionally.
int default_k(Variant variant, int min_dim);

// Bilinear resample of a 3-channel trigger to the target size
// (half-pixel-centered sampling, coordinates clamped at the border).
// InvalidInput on a zero-area target or non-3-channel trigger.
ImageTensor prepare_trigger(const ImageTensor& trigger, int target_h,
                            int target_w);

// RGB-variant embedding: per channel, decompose clean and prepared
// trigger, replace the trailing k triplets, reconstruct. GRAY clean
// images embed against the trigger's luma. The plain call clamps and
// quantizes to 8-bit levels; the _raw call stops before quantization.
ImageTensor embed_rgb(const ImageTensor& clean, const ImageTensor& trigger,
                      const PoisonConfig& cfg);
ImageTensor embed_rgb_raw(const ImageTensor& clean, const ImageTensor& trigger,
                          const PoisonConfig& cfg);

// UV-variant embedding: same splice applied to the U and V planes of the
// BT.601 representation, luma kept from the clean image, converted back
// to RGB. Requires a 3-channel clean image.
ImageTensor embed_uv(const ImageTensor& clean, const ImageTensor& trigger,
                     const PoisonConfig& cfg);
ImageTensor embed_uv_raw(const ImageTensor& clean, const ImageTensor& trigger,
                         const PoisonConfig& cfg);

// Dispatches on cfg.variant.
ImageTensor embed(const ImageTensor& clean, const ImageTensor& trigger,
                  const PoisonConfig& cfg);

// Per-pixel |clean - poisoned|, max-normalized over the whole image for
// display; an all-zero difference stays all-zero.
ImageTensor residual(const ImageTensor& clean, const ImageTensor& poisoned);

}  // namespace deba
