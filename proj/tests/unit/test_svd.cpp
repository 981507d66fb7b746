#include <doctest.h>

#include <cmath>
#include <deba/errors.hpp>
#include <deba/matrix.hpp>
#include <deba/rng.hpp>
#include <deba/svd.hpp>

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using deba::RealMatrix;
using deba::SplitMix64;
using deba::SvdFactors;
namespace dt = deba::testing;

namespace {

void check_invariants(const SvdFactors& f) {
  for (std::size_t i = 0; i + 1 < f.sigma.size(); ++i) {
    CHECK(f.sigma[i] >= f.sigma[i + 1]);
  }
  for (double s : f.sigma) CHECK(s >= 0.0);
  CHECK(dt::orthonormality_residual(f.u) <= 1e-8);
  CHECK(dt::orthonormality_residual(f.v) <= 1e-8);
  for (int j = 0; j < f.rank_dim(); ++j) {
    int dominant = 0;
    for (int i = 0; i < f.u.rows(); ++i) {
      if (std::fabs(f.u(i, j)) > std::fabs(f.u(dominant, j))) dominant = i;
    }
    CHECK(f.u(dominant, j) >= 0.0);
  }
}

double relative_error(const RealMatrix& a, const RealMatrix& b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    ref += a.data()[i] * a.data()[i];
  }
  return std::sqrt(diff) / std::max(1.0, std::sqrt(ref));
}

}  // namespace

TEST_SUITE_BEGIN("svd");

TEST_CASE("decompose identity") {
  const auto f = deba::decompose(RealMatrix::identity(3));
  REQUIRE(f.sigma.size() == 3);
  for (double s : f.sigma) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  // u v^T must reproduce the identity
  RealMatrix uvt(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int t = 0; t < 3; ++t) acc += f.u(i, t) * f.v(j, t);
      uvt(i, j) = acc;
    }
  }
  CHECK(deba::max_abs_diff(uvt, RealMatrix::identity(3)) <= 1e-12);
  check_invariants(f);
}

TEST_CASE("decompose diagonal matrix") {
  RealMatrix a(2, 2);
  a(0, 0) = 5.0;
  a(1, 1) = 2.0;
  const auto f = deba::decompose(a);
  CHECK(f.sigma[0] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(f.sigma[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(deba::max_abs_diff(f.u, RealMatrix::identity(2)) <= 1e-12);
  CHECK(deba::max_abs_diff(f.v, RealMatrix::identity(2)) <= 1e-12);
}

TEST_CASE("decompose 8x6 seeded matrix against triple-product oracle") {
  SplitMix64 rng(2718);
  const RealMatrix a = dt::random_matrix(8, 6, rng);
  const auto f = deba::decompose(a);
  REQUIRE(f.sigma.size() == 6);
  CHECK(f.u.rows() == 8);
  CHECK(f.v.rows() == 6);
  const RealMatrix rebuilt = dt::naive_reconstruction(f);
  CHECK(relative_error(a, rebuilt) <= 1e-10);
  check_invariants(f);
}

TEST_CASE("decompose rejects non-finite input") {
  RealMatrix a(2, 2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(deba::decompose(a), deba::InvalidInput);
  a(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(deba::decompose(a), deba::InvalidInput);
}

TEST_CASE("reconstruct diagonal factors") {
  const auto f = dt::diagonal_factors({3.0, 1.0});
  const RealMatrix m = deba::reconstruct(f);
  CHECK(m(0, 0) == 3.0);
  CHECK(m(1, 1) == 1.0);
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 0) == 0.0);
}

TEST_CASE("reconstruct round trip on seeded 32x32") {
  SplitMix64 rng(31415);
  const RealMatrix a = dt::random_matrix(32, 32, rng);
  CHECK(relative_error(a, deba::reconstruct(deba::decompose(a))) <= 1e-10);
}

TEST_CASE("reconstruct of zero sigma annihilates") {
  SplitMix64 rng(5);
  auto f = deba::decompose(dt::random_matrix(4, 4, rng));
  f.sigma.assign(f.sigma.size(), 0.0);
  const RealMatrix m = deba::reconstruct(f);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.data()[i] == 0.0);
}

TEST_CASE("reconstruct rejects inconsistent dimensions") {
  auto f = dt::diagonal_factors({2.0, 1.0});
  f.sigma.push_back(0.5);  // now u/v have 2 columns but sigma has 3 entries
  CHECK_THROWS_AS(deba::reconstruct(f), deba::InvalidInput);
}

TEST_CASE("splice_tail diagonal fixtures") {
  const auto clean = dt::diagonal_factors({4.0, 3.0, 2.0});
  const auto trigger = dt::diagonal_factors({9.0, 8.0, 7.0});

  CHECK(deba::splice_tail(clean, trigger, 0) == clean);
  CHECK(deba::splice_tail(clean, trigger, 3) == trigger);

  const auto one = deba::splice_tail(clean, trigger, 1);
  CHECK(one.sigma == std::vector<double>{4.0, 3.0, 7.0});
  const auto two = deba::splice_tail(clean, trigger, 2);
  CHECK(two.sigma == std::vector<double>{4.0, 8.0, 7.0});
}

TEST_CASE("splice_tail keeps positional order without re-sorting") {
  // trigger tail value larger than the clean head: stays in place
  const auto clean = dt::diagonal_factors({4.0, 1.0});
  const auto trigger = dt::diagonal_factors({100.0, 50.0});
  const auto spliced = deba::splice_tail(clean, trigger, 1);
  CHECK(spliced.sigma == std::vector<double>{4.0, 50.0});
}

TEST_CASE("splice_tail self-splice identity, all k") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 2 + static_cast<int>(rng.next_below(10));
    const int cols = 2 + static_cast<int>(rng.next_below(10));
    const auto f = deba::decompose(dt::random_matrix(rows, cols, rng));
    for (int k = 0; k <= f.rank_dim(); ++k) {
      CHECK(deba::splice_tail(f, f, k) == f);  // bitwise
    }
  }
}

TEST_CASE("splice_tail is deterministic") {
  SplitMix64 rng(7);
  const auto a = deba::decompose(dt::random_matrix(6, 5, rng));
  const auto b = deba::decompose(dt::random_matrix(6, 5, rng));
  CHECK(deba::splice_tail(a, b, 3) == deba::splice_tail(a, b, 3));
}

TEST_CASE("splice_tail error cases") {
  SplitMix64 rng(11);
  const auto a = deba::decompose(dt::random_matrix(5, 5, rng));
  const auto b = deba::decompose(dt::random_matrix(5, 4, rng));
  CHECK_THROWS_AS(deba::splice_tail(a, a, 6), deba::KTooLarge);
  CHECK_THROWS_AS(deba::splice_tail(a, a, -1), deba::InvalidInput);
  CHECK_THROWS_AS(deba::splice_tail(a, b, 1), deba::InvalidInput);
}

TEST_CASE("canonicalize_signs flips dominant-negative columns") {
  SvdFactors f;
  f.u = RealMatrix(2, 1);
  f.u(0, 0) = -1.0;
  f.v = RealMatrix(2, 1);
  f.v(1, 0) = -1.0;
  f.sigma = {2.0};
  const auto fixed = deba::canonicalize_signs(f);
  CHECK(fixed.u(0, 0) == 1.0);
  CHECK(fixed.v(1, 0) == 1.0);
}

TEST_CASE("canonicalize_signs idempotent and reconstruction-preserving") {
  SplitMix64 rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = deba::decompose(dt::random_matrix(7, 4, rng));
    // scramble signs
    for (int j = 0; j < f.rank_dim(); ++j) {
      if (rng.next_below(2)) {
        for (int i = 0; i < f.u.rows(); ++i) f.u(i, j) = -f.u(i, j);
        for (int i = 0; i < f.v.rows(); ++i) f.v(i, j) = -f.v(i, j);
      }
    }
    const auto once = deba::canonicalize_signs(f);
    CHECK(deba::canonicalize_signs(once) == once);
    CHECK(deba::max_abs_diff(deba::reconstruct(once), deba::reconstruct(f)) <=
          1e-12);
  }
}

TEST_CASE("decompose invariants over random, rank-deficient and repeated-sigma") {
  SplitMix64 rng(606);
  for (int trial = 0; trial < 60; ++trial) {
    const int rows = 1 + static_cast<int>(rng.next_below(16));
    const int cols = 1 + static_cast<int>(rng.next_below(16));
    RealMatrix a;
    switch (trial % 3) {
      case 0:
        a = dt::random_matrix(rows, cols, rng);
        break;
      case 1: {
        const int rank = 1 + static_cast<int>(
                                 rng.next_below(static_cast<std::uint64_t>(
                                     std::min(rows, cols))));
        a = dt::rank_deficient_matrix(rows, cols, rank, rng);
        break;
      }
      default: {
        const int r = std::min(rows, cols);
        std::vector<double> sigma(static_cast<std::size_t>(r), 2.5);
        for (std::size_t i = static_cast<std::size_t>(r) / 2; i < sigma.size(); ++i) {
          sigma[i] = 0.5;
        }
        a = dt::repeated_sigma_matrix(rows, cols, sigma, rng);
        break;
      }
    }
    const auto f = deba::decompose(a);
    check_invariants(f);
    CHECK(relative_error(a, deba::reconstruct(f)) <= 1e-10);
  }
}

TEST_SUITE_END();
