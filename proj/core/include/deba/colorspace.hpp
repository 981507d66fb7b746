#pragma once

#include "deba/image.hpp"

namespace deba {

// Analog BT.601 with a +0.5 chroma offset so every plane lives in [0, 1]:
//   Y = 0.299 R + 0.587 G + 0.114 B
//   U = 0.492 (B - Y) + 0.5
//   V = 0.877 (R - Y) + 0.5
// yuv_to_rgb is the exact algebraic inverse; out-of-range values are left
// alone here and only clamped at the quantization boundary.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;
inline constexpr double kChromaU = 0.492;
inline constexpr double kChromaV = 0.877;
inline constexpr double kChromaOffset = 0.5;

ImageTensor rgb_to_yuv(const ImageTensor& img);  // InvalidInput unless RGB
ImageTensor yuv_to_rgb(const ImageTensor& img);  // InvalidInput unless YUV

// Luma plane of an RGB image as a GRAY tensor (same weights as Y above).
ImageTensor rgb_to_gray(const ImageTensor& img);

}  // namespace deba
