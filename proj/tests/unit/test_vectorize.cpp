#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geomrl/manifold/vectorize.hpp"
#include "test_util.hpp"

using namespace geomrl;
using geomrl::test::Rng;

TEST(Mandel, ThreeByThreeLayout) {
  Eigen::MatrixXd s(3, 3);
  s << 1, 2, 3,
       2, 4, 5,
       3, 5, 6;
  const double r2 = std::numbers::sqrt2;
  Eigen::VectorXd expected(6);
  expected << 1, 4, 6, r2 * 5, r2 * 3, r2 * 2;
  EXPECT_LE((mandel_vec(s) - expected).norm(), 1e-15);

  Eigen::VectorXd id(6);
  id << 1, 1, 1, 0, 0, 0;
  EXPECT_EQ(mandel_vec(Eigen::MatrixXd::Identity(3, 3)), id);
  EXPECT_EQ(mandel_unvec(id), Eigen::MatrixXd::Identity(3, 3));
}

TEST(Mandel, OffDiagonalOrderIsReversedColumnMajor) {
  using P = std::pair<int, int>;
  EXPECT_EQ(off_diagonal_order(2), (std::vector<P>{{0, 1}}));
  EXPECT_EQ(off_diagonal_order(3), (std::vector<P>{{1, 2}, {0, 2}, {0, 1}}));
  EXPECT_EQ(off_diagonal_order(4), (std::vector<P>{{2, 3}, {1, 3}, {0, 3}, {1, 2}, {0, 2}, {0, 1}}));
}

TEST(Mandel, BadLength) {
  EXPECT_THROW(mandel_unvec(Eigen::VectorXd::Zero(4)), BadLength);
  EXPECT_THROW(mandel_unvec(Eigen::VectorXd::Zero(0)), BadLength);
  EXPECT_THROW(chol_unvec(Eigen::VectorXd::Zero(5)), BadLength);
}

TEST(Mandel, RoundTripAndIsometry) {
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    const int d = (i % 3 == 0) ? 2 : (i % 3 == 1 ? 3 : 6);
    const Eigen::MatrixXd s = test::random_symmetric(rng, d, -3.0, 3.0);
    const Eigen::VectorXd v = mandel_vec(s);
    ASSERT_EQ(v.size(), triangular_size(d));
    ASSERT_NEAR(v.norm(), s.norm(), 1e-12);
    ASSERT_LE((mandel_unvec(v) - s).norm(), 1e-12);
  }
}

TEST(Cholesky, Examples) {
  Eigen::VectorXd id(6);
  id << 1, 1, 1, 0, 0, 0;
  EXPECT_LE((chol_vec(SpdMatrix::identity(3)) - id).norm(), 0.0);

  Eigen::MatrixXd m = Eigen::Vector2d(4, 9).asDiagonal();
  EXPECT_LE((chol_vec(SpdMatrix(m)) - Eigen::Vector3d(2, 3, 0)).norm(), 1e-15);

  const SpdMatrix floor = chol_unvec(Eigen::VectorXd::Zero(6));
  EXPECT_LE((floor.matrix() - kRepairEpsilon * kRepairEpsilon * Eigen::MatrixXd::Identity(3, 3)).norm(),
            1e-30);
}

TEST(Cholesky, RoundTrip) {
  Rng rng(32);
  for (int i = 0; i < 10000; ++i) {
    const SpdMatrix p = test::random_spd(rng, i % 2 ? 3 : 6);
    ASSERT_LE((chol_unvec(chol_vec(p)).matrix() - p.matrix()).norm(), 1e-9);
  }
}

// U^T U with a floored diagonal has det = prod(u_ii^2) > 0. In floating point a
// diagonal at the 1e-8 floor next to O(1) off-diagonals rounds the smallest
// eigenvalue to ~0, so strict positivity is only asserted away from the floor.
TEST(Cholesky, UnvecAlwaysPositiveDefinite) {
  Rng rng(33);
  int strict = 0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd v = test::gaussian_vector(rng, 6);
    const SpdMatrix p = chol_unvec(v);
    ASSERT_LE(linalg::asymmetry(p.matrix()), 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(p.matrix());
    ASSERT_GE(e.eigenvalues().minCoeff(), -1e-12 * p.matrix().norm());
    if (v.head(3).minCoeff() >= 0.05) {
      ++strict;
      ASSERT_GT(e.eigenvalues().minCoeff(), 0.0);
      ASSERT_NO_THROW(SpdMatrix{p.matrix()});
    }
  }
  EXPECT_GT(strict, 500);
}

TEST(NearestSpd, Examples) {
  const Eigen::MatrixXd a = Eigen::Vector2d(1, 2).asDiagonal();
  EXPECT_EQ(nearest_spd(a).matrix(), a);
  const Eigen::MatrixXd b = Eigen::Vector2d(1, -3).asDiagonal();
  const Eigen::MatrixXd expected = Eigen::Vector2d(1, kRepairEpsilon).asDiagonal();
  EXPECT_LE((nearest_spd(b).matrix() - expected).norm(), 1e-15);
}

// Brute-force comparison: random PSD candidates with the eigenvalue floor
// never come closer in Frobenius norm than the clamped projection.
TEST(NearestSpd, MinimalAmongFlooredCandidates) {
  Rng rng(34);
  std::normal_distribution<double> g(0.0, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd s = test::random_symmetric(rng, 3, -2.0, 2.0);
    const double best = (nearest_spd(s).matrix() - s).norm();
    for (int k = 0; k < 200; ++k) {
      Eigen::MatrixXd cand = nearest_spd(s).matrix();
      Eigen::MatrixXd pert = test::random_symmetric(rng, 3, -1.0, 1.0) * g(rng);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(cand + pert);
      Eigen::VectorXd l = e.eigenvalues().cwiseMax(kRepairEpsilon);
      cand = e.eigenvectors() * l.asDiagonal() * e.eigenvectors().transpose();
      ASSERT_GE((cand - s).norm(), best - 1e-12);
    }
  }
}
