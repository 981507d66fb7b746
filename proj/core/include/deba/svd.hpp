#pragma once

#include "deba/matrix.hpp"

namespace deba {

// Thin SVD of an m x n matrix, r = min(m, n):
//   u      m x r, orthonormal columns (left singular vectors)
//   sigma  r singular values, non-increasing, nonnegative
//   v      n x r, orthonormal columns (right singular vectors)
// so that  A = u * diag(sigma) * v^T.
//
// Factors produced by decompose() are sign-canonical: in every column of u
// the entry of largest magnitude (ties broken by lowest row index) is
// nonnegative. That pins down the decomposition for distinct singular
// values and makes splices reproducible across runs.
struct SvdFactors {
  RealMatrix u;
  std::vector<double> sigma;
  RealMatrix v;

  int rank_dim() const { return static_cast<int>(sigma.size()); }

  friend bool operator==(const SvdFactors&, const SvdFactors&) = default;
};

// Thin SVD. Throws InvalidInput on non-finite input.
SvdFactors decompose(const RealMatrix& a);

// u * diag(sigma) * v^T. Throws InvalidInput on inconsistent dimensions.
RealMatrix reconstruct(const SvdFactors& f);

// Positional tail replacement: the last k singular triplets of `clean`
// are overwritten by the last k triplets of `trigger`; no re-sorting of
// sigma happens afterwards, even if ordering breaks. Requires identical
// shapes and 0 <= k <= r (KTooLarge beyond).
SvdFactors splice_tail(const SvdFactors& clean, const SvdFactors& trigger,
                       int k);

// Flips the sign of (u_j, v_j) pairs whose dominant u entry is negative.
// Leaves the reconstruction unchanged; idempotent.
SvdFactors canonicalize_signs(SvdFactors f);

}  // namespace deba
