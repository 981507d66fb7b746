#pragma once

// Independent naive-loop evaluations used as oracles against the
// production implementations. These deliberately re-derive everything
// from the printed formulas and share no code with core/.

#include <deba/image.hpp>
#include <deba/matrix.hpp>
#include <deba/svd.hpp>

namespace deba::testing {

// Mean over pixels and channels of squared level differences, 0..255.
double naive_mse(const ImageTensor& a, const ImageTensor& b);

// 10 * log10(255^2 / mse); +infinity at mse == 0.
double naive_psnr(const ImageTensor& a, const ImageTensor& b);

// Whole-plane SSIM with N-1 variance, averaged over channels.
double naive_ssim(const ImageTensor& a, const ImageTensor& b);

// Sum over the first `keep` triplets of sigma_t * u_t * v_t^T.
RealMatrix partial_reconstruction(const SvdFactors& f, int keep);

// Full naive triple product (all triplets).
RealMatrix naive_reconstruction(const SvdFactors& f);

// max |(a^T a - I)_{ij}| over column pairs.
double orthonormality_residual(const RealMatrix& a);

}  // namespace deba::testing
