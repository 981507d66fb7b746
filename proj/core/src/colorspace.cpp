#include "deba/colorspace.hpp"

#include "deba/errors.hpp"

namespace deba {

ImageTensor rgb_to_yuv(const ImageTensor& img) {
  validate(img);
  if (img.space != ColorSpace::kRgb)
    throw InvalidInput("rgb_to_yuv: expected an RGB image");

  const RealMatrix& r = img.planes[0];
  const RealMatrix& g = img.planes[1];
  const RealMatrix& b = img.planes[2];

  ImageTensor out;
  out.space = ColorSpace::kYuv;
  out.planes.assign(3, RealMatrix(r.rows(), r.cols()));
  RealMatrix& y = out.planes[0];
  RealMatrix& u = out.planes[1];
  RealMatrix& v = out.planes[2];

  for (std::size_t i = 0; i < r.size(); ++i) {
    // Delta form of 0.299 R + 0.587 G + 0.114 B: achromatic pixels map to
    // Y = R = G = B and U = V = 0.5 without rounding residue.
    const double blue = b.data()[i];
    const double luma = blue + kLumaR * (r.data()[i] - blue) +
                        kLumaG * (g.data()[i] - blue);
    y.data()[i] = luma;
    u.data()[i] = kChromaU * (blue - luma) + kChromaOffset;
    v.data()[i] = kChromaV * (r.data()[i] - luma) + kChromaOffset;
  }
  return out;
}

ImageTensor yuv_to_rgb(const ImageTensor& img) {
  validate(img);
  if (img.space != ColorSpace::kYuv)
    throw InvalidInput("yuv_to_rgb: expected a YUV image");

  const RealMatrix& y = img.planes[0];
  const RealMatrix& u = img.planes[1];
  const RealMatrix& v = img.planes[2];

  ImageTensor out;
  out.space = ColorSpace::kRgb;
  out.planes.assign(3, RealMatrix(y.rows(), y.cols()));
  RealMatrix& r = out.planes[0];
  RealMatrix& g = out.planes[1];
  RealMatrix& b = out.planes[2];

  for (std::size_t i = 0; i < y.size(); ++i) {
    // Exact inverse of the delta-form conversion above.
    const double luma = y.data()[i];
    const double red = luma + (v.data()[i] - kChromaOffset) / kChromaV;
    const double blue = luma + (u.data()[i] - kChromaOffset) / kChromaU;
    const double green =
        blue + (luma - blue - kLumaR * (red - blue)) / kLumaG;
    r.data()[i] = red;
    g.data()[i] = green;
    b.data()[i] = blue;
  }
  return out;
}

ImageTensor rgb_to_gray(const ImageTensor& img) {
  validate(img);
  if (img.space != ColorSpace::kRgb)
    throw InvalidInput("rgb_to_gray: expected an RGB image");

  ImageTensor out;
  out.space = ColorSpace::kGray;
  out.planes.assign(1, RealMatrix(img.height(), img.width()));
  const RealMatrix& r = img.planes[0];
  const RealMatrix& g = img.planes[1];
  const RealMatrix& b = img.planes[2];
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double blue = b.data()[i];
    out.planes[0].data()[i] = blue + kLumaR * (r.data()[i] - blue) +
                              kLumaG * (g.data()[i] - blue);
  }
  return out;
}

}  // namespace deba
