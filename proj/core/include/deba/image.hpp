#pragma once

#include <cstdint>
#include <vector>

#include "deba/matrix.hpp"

namespace deba {

enum class ColorSpace { kRgb, kYuv, kGray };

const char* to_string(ColorSpace space);

// Channel-planar image. Planes hold doubles nominally in [0, 1]; values
// only touch the 8-bit grid when quantize() is applied, which is the
// boundary every file format goes through.
struct ImageTensor {
  ColorSpace space = ColorSpace::kRgb;
  std::vector<RealMatrix> planes;  // 1 (GRAY) or 3 (RGB, YUV)

  int height() const { return planes.empty() ? 0 : planes[0].rows(); }
  int width() const { return planes.empty() ? 0 : planes[0].cols(); }
  int channels() const { return static_cast<int>(planes.size()); }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;
};

// Throws InvalidInput unless planes are nonempty, uniformly shaped and the
// channel count matches the space tag (GRAY: 1, RGB/YUV: 3).
void validate(const ImageTensor& img);

// byte level b <-> plane value b / 255
std::uint8_t to_byte(double v);  // round(clamp(v, 0, 1) * 255)
double from_byte(std::uint8_t b);

// Snaps every value to the 8-bit grid: v -> round(clamp(v,0,1)*255) / 255.
ImageTensor quantize(const ImageTensor& img);

bool same_shape(const ImageTensor& a, const ImageTensor& b);

}  // namespace deba
