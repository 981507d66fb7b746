#include "deba/image.hpp"

#include <cmath>

#include "deba/errors.hpp"

namespace deba {

const char* to_string(ColorSpace space) {
  switch (space) {
    case ColorSpace::kRgb: return "RGB";
    case ColorSpace::kYuv: return "YUV";
    case ColorSpace::kGray: return "GRAY";
  }
  return "?";
}

void validate(const ImageTensor& img) {
  const int c = img.channels();
  if (c != 1 && c != 3) throw InvalidInput("image must have 1 or 3 channels");
  if (img.space == ColorSpace::kGray) {
    if (c != 1) throw InvalidInput("GRAY image must have exactly 1 plane");
  } else if (c != 3) {
    throw InvalidInput("RGB/YUV image must have exactly 3 planes");
  }
  for (const auto& p : img.planes) {
    if (p.empty()) throw InvalidInput("image plane is empty");
    if (!p.same_shape(img.planes[0]))
      throw InvalidInput("image planes have mismatched shapes");
  }
}

std::uint8_t to_byte(double v) {
  if (!(v > 0.0)) v = 0.0;  // also catches NaN
  if (v > 1.0) v = 1.0;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

double from_byte(std::uint8_t b) { return static_cast<double>(b) / 255.0; }

ImageTensor quantize(const ImageTensor& img) {
  validate(img);
  ImageTensor out = img;
  for (auto& p : out.planes) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      p.data()[i] = from_byte(to_byte(p.data()[i]));
    }
  }
  return out;
}

bool same_shape(const ImageTensor& a, const ImageTensor& b) {
  return a.channels() == b.channels() && a.height() == b.height() &&
         a.width() == b.width();
}

}  // namespace deba
