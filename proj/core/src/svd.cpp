#include "deba/svd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

#include "deba/errors.hpp"

namespace deba {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> as_eigen(const RealMatrix& m) {
  return {m.data(), m.rows(), m.cols()};
}

RealMatrix from_eigen(const Eigen::MatrixXd& e) {
  RealMatrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  Eigen::Map<EigenRowMajor>(m.data(), e.rows(), e.cols()) = e;
  return m;
}

void check_consistent(const SvdFactors& f) {
  const int r = f.rank_dim();
  if (f.u.empty() || f.v.empty() || r == 0)
    throw InvalidInput("svd factors are empty");
  if (f.u.cols() != r || f.v.cols() != r)
    throw InvalidInput("svd factors: u/v column count must equal sigma size");
}

}  // namespace

SvdFactors decompose(const RealMatrix& a) {
  if (a.empty()) throw InvalidInput("decompose: empty matrix");
  if (!all_finite(a)) throw InvalidInput("decompose: non-finite input");

  // Jacobi SVD: slower than bidiagonalization for large matrices but the
  // most accurate option, and image planes here are small (<= a few
  // hundred on a side). Produces orthonormal thin U/V even for
  // rank-deficient input.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      as_eigen(a), Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdFactors f;
  f.u = from_eigen(svd.matrixU());
  f.v = from_eigen(svd.matrixV());
  const auto& s = svd.singularValues();
  f.sigma.assign(s.data(), s.data() + s.size());
  return canonicalize_signs(std::move(f));
}

RealMatrix reconstruct(const SvdFactors& f) {
  check_consistent(f);
  const int r = f.rank_dim();
  Eigen::Map<const Eigen::VectorXd> sigma(f.sigma.data(), r);
  Eigen::MatrixXd prod =
      as_eigen(f.u) * sigma.asDiagonal() * as_eigen(f.v).transpose();
  return from_eigen(prod);
}

SvdFactors splice_tail(const SvdFactors& clean, const SvdFactors& trigger,
                       int k) {
  check_consistent(clean);
  check_consistent(trigger);
  if (clean.u.rows() != trigger.u.rows() ||
      clean.v.rows() != trigger.v.rows() ||
      clean.rank_dim() != trigger.rank_dim())
    throw InvalidInput("splice_tail: factor shapes differ");
  const int r = clean.rank_dim();
  if (k < 0) throw InvalidInput("splice_tail: k must be nonnegative");
  if (k > r) throw KTooLarge("splice_tail: k exceeds min(rows, cols)");

  SvdFactors out = clean;
  const int first = r - k;  // triplets [first, r) come from the trigger
  for (int j = first; j < r; ++j) {
    out.sigma[static_cast<std::size_t>(j)] =
        trigger.sigma[static_cast<std::size_t>(j)];
    for (int i = 0; i < out.u.rows(); ++i) out.u(i, j) = trigger.u(i, j);
    for (int i = 0; i < out.v.rows(); ++i) out.v(i, j) = trigger.v(i, j);
  }
  return out;
}

SvdFactors canonicalize_signs(SvdFactors f) {
  check_consistent(f);
  const int r = f.rank_dim();
  for (int j = 0; j < r; ++j) {
    int dominant = 0;
    double best = -1.0;
    for (int i = 0; i < f.u.rows(); ++i) {
      const double mag = std::fabs(f.u(i, j));
      if (mag > best) {  // strict: ties keep the lowest row index
        best = mag;
        dominant = i;
      }
    }
    if (f.u(dominant, j) < 0.0) {
      for (int i = 0; i < f.u.rows(); ++i) f.u(i, j) = -f.u(i, j);
      for (int i = 0; i < f.v.rows(); ++i) f.v(i, j) = -f.v(i, j);
    }
  }
  return f;
}

}  // namespace deba
