#include "support/synthetic.hpp"

#include <cmath>
#include <numbers>

#include <deba/colorspace.hpp>
#include <deba/errors.hpp>

namespace deba::testing {

RealMatrix random_matrix(int rows, int cols, SplitMix64& rng) {
  RealMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    m.data()[i] = 2.0 * rng.next_unit() - 1.0;
  }
  return m;
}

RealMatrix rank_deficient_matrix(int rows, int cols, int rank,
                                 SplitMix64& rng) {
  const RealMatrix left = random_matrix(rows, rank, rng);
  const RealMatrix right = random_matrix(rank, cols, rng);
  RealMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int t = 0; t < rank; ++t) acc += left(i, t) * right(t, j);
      out(i, j) = acc;
    }
  }
  return out;
}

RealMatrix orthonormal_columns(int rows, int cols, SplitMix64& rng) {
  RealMatrix q = random_matrix(rows, cols, rng);
  for (int j = 0; j < cols; ++j) {
    for (int prev = 0; prev < j; ++prev) {
      double dot = 0.0;
      for (int i = 0; i < rows; ++i) dot += q(i, j) * q(i, prev);
      for (int i = 0; i < rows; ++i) q(i, j) -= dot * q(i, prev);
    }
    double norm = 0.0;
    for (int i = 0; i < rows; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-8) {  // retry the column with fresh randomness
      for (int i = 0; i < rows; ++i) q(i, j) = 2.0 * rng.next_unit() - 1.0;
      --j;
      continue;
    }
    for (int i = 0; i < rows; ++i) q(i, j) /= norm;
  }
  return q;
}

RealMatrix assemble_from_triplets(const RealMatrix& u,
                                  const std::vector<double>& sigma,
                                  const RealMatrix& v) {
  RealMatrix out(u.rows(), v.rows());
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = 0; j < v.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < sigma.size(); ++t) {
        acc += sigma[t] * u(i, static_cast<int>(t)) * v(j, static_cast<int>(t));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

RealMatrix repeated_sigma_matrix(int rows, int cols,
                                 const std::vector<double>& sigma,
                                 SplitMix64& rng) {
  const int r = static_cast<int>(sigma.size());
  const RealMatrix u = orthonormal_columns(rows, r, rng);
  const RealMatrix v = orthonormal_columns(cols, r, rng);
  return assemble_from_triplets(u, sigma, v);
}

SvdFactors diagonal_factors(const std::vector<double>& sigma) {
  const int n = static_cast<int>(sigma.size());
  SvdFactors f;
  f.u = RealMatrix::identity(n);
  f.sigma = sigma;
  f.v = RealMatrix::identity(n);
  return f;
}

ImageTensor random_image(int h, int w, SplitMix64& rng) {
  ImageTensor img;
  img.space = ColorSpace::kRgb;
  img.planes.assign(3, RealMatrix(h, w));
  for (auto& plane : img.planes) {
    for (std::size_t i = 0; i < plane.size(); ++i) {
      plane.data()[i] = from_byte(static_cast<std::uint8_t>(rng.next_below(256)));
    }
  }
  return img;
}

RealMatrix value_noise(int h, int w, SplitMix64& rng, int octaves,
                       double persistence) {
  RealMatrix out(h, w);
  double amplitude = 1.0;
  double total = 0.0;
  for (int o = 0; o < octaves; ++o) {
    const int cells = 1 << (o + 1);
    std::vector<double> lattice(static_cast<std::size_t>(cells + 1) *
                                static_cast<std::size_t>(cells + 1));
    for (auto& v : lattice) v = rng.next_unit();
    auto lat = [&](int y, int x) {
      return lattice[static_cast<std::size_t>(y) *
                         static_cast<std::size_t>(cells + 1) +
                     static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < h; ++y) {
      const double fy = (y + 0.5) / h * cells;
      const int y0 = std::min(static_cast<int>(fy), cells - 1);
      const double wy = fy - y0;
      for (int x = 0; x < w; ++x) {
        const double fx = (x + 0.5) / w * cells;
        const int x0 = std::min(static_cast<int>(fx), cells - 1);
        const double wx = fx - x0;
        const double val =
            (1 - wy) * ((1 - wx) * lat(y0, x0) + wx * lat(y0, x0 + 1)) +
            wy * ((1 - wx) * lat(y0 + 1, x0) + wx * lat(y0 + 1, x0 + 1));
        out(y, x) += amplitude * val;
      }
    }
    total += amplitude;
    amplitude *= persistence;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] /= total;
  return out;
}

namespace {

ImageTensor yuv_planes_to_rgb(RealMatrix luma, RealMatrix u, RealMatrix v) {
  ImageTensor yuv;
  yuv.space = ColorSpace::kYuv;
  yuv.planes = {std::move(luma), std::move(u), std::move(v)};
  return quantize(yuv_to_rgb(yuv));
}

// Per-pixel texture on top of the smooth octaves. Photographs carry
// broadband grain whose energy lands in the trailing singular values;
// without it the synthetic images are unnaturally low-rank.
void add_grain(RealMatrix& plane, SplitMix64& rng, double amplitude) {
  for (std::size_t i = 0; i < plane.size(); ++i) {
    plane.data()[i] += amplitude * (rng.next_unit() - 0.5);
  }
}

constexpr double kLumaGrain = 0.10;    // ~7 levels peak-to-peak std
constexpr double kChromaGrain = 0.03;  // chroma is far smoother in photos

}  // namespace

ImageTensor natural_image(int h, int w, SplitMix64& rng) {
  RealMatrix luma = value_noise(h, w, rng, 4, 0.55);
  for (std::size_t i = 0; i < luma.size(); ++i) {
    luma.data()[i] = 0.12 + 0.76 * luma.data()[i];
  }
  add_grain(luma, rng, kLumaGrain);
  RealMatrix u = value_noise(h, w, rng, 2, 0.5);
  RealMatrix v = value_noise(h, w, rng, 2, 0.5);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u.data()[i] = 0.5 + 0.30 * (u.data()[i] - 0.5);
    v.data()[i] = 0.5 + 0.30 * (v.data()[i] - 0.5);
  }
  add_grain(u, rng, kChromaGrain);
  add_grain(v, rng, kChromaGrain);
  return yuv_planes_to_rgb(std::move(luma), std::move(u), std::move(v));
}

ImageTensor natural_trigger(int h, int w, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RealMatrix luma = value_noise(h, w, rng, 5, 0.65);
  for (std::size_t i = 0; i < luma.size(); ++i) {
    luma.data()[i] = 0.10 + 0.80 * luma.data()[i];
  }
  add_grain(luma, rng, 0.12);
  RealMatrix u = value_noise(h, w, rng, 3, 0.6);
  RealMatrix v = value_noise(h, w, rng, 3, 0.6);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u.data()[i] = 0.5 + 0.34 * (u.data()[i] - 0.5);
    v.data()[i] = 0.5 + 0.34 * (v.data()[i] - 0.5);
  }
  add_grain(u, rng, 0.04);
  add_grain(v, rng, 0.04);
  return yuv_planes_to_rgb(std::move(luma), std::move(u), std::move(v));
}

LabeledDataset synthetic_dataset(int per_class, int classes, int class_count,
                                 int h, int w, SplitMix64& rng) {
  if (classes > class_count) throw InvalidInput("synthetic_dataset: classes > class_count");
  constexpr double kTau = 2.0 * std::numbers::pi;

  LabeledDataset ds;
  ds.class_count = class_count;
  for (int cls = 0; cls < classes; ++cls) {
    const double ring = kTau * cls / classes;
    const double anchor_x = w / 2.0 + 0.28 * w * std::cos(ring);
    const double anchor_y = h / 2.0 + 0.28 * h * std::sin(ring);
    const double base_angle = std::numbers::pi * cls / classes;

    for (int i = 0; i < per_class; ++i) {
      const double cx = anchor_x + 6.0 * (rng.next_unit() - 0.5);
      const double cy = anchor_y + 6.0 * (rng.next_unit() - 0.5);
      const double angle = base_angle + 0.5 * (rng.next_unit() - 0.5);
      const double freq = 2.5 + 1.5 * rng.next_unit();
      const double phase = kTau * rng.next_unit();
      const double blob_radius = 0.16 * w;

      RealMatrix noise = value_noise(h, w, rng, 3, 0.5);
      RealMatrix luma(h, w);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double dx = x - cx;
          const double dy = y - cy;
          const double blob =
              std::exp(-(dx * dx + dy * dy) / (2.0 * blob_radius * blob_radius));
          const double grating =
              0.5 + 0.5 * std::sin(kTau * freq *
                                       (x * std::cos(angle) + y * std::sin(angle)) /
                                       w +
                                   phase);
          luma(y, x) = 0.10 + 0.78 * (0.28 * blob + 0.20 * grating +
                                      0.52 * noise(y, x));
        }
      }
      add_grain(luma, rng, kLumaGrain);

      RealMatrix u = value_noise(h, w, rng, 2, 0.5);
      RealMatrix v = value_noise(h, w, rng, 2, 0.5);
      for (std::size_t t = 0; t < u.size(); ++t) {
        u.data()[t] = 0.5 + 0.28 * (u.data()[t] - 0.5);
        v.data()[t] = 0.5 + 0.28 * (v.data()[t] - 0.5);
      }
      add_grain(u, rng, kChromaGrain);
      add_grain(v, rng, kChromaGrain);

      ds.images.push_back(
          yuv_planes_to_rgb(std::move(luma), std::move(u), std::move(v)));
      ds.labels.push_back(cls);
    }
  }
  return ds;
}

}  // namespace deba::testing
