#include <gtest/gtest.h>

#include <cmath>

#include "geomrl/manifold/spd.hpp"
#include "test_util.hpp"

using namespace geomrl;
using geomrl::test::Rng;

namespace {

constexpr int kCases = 10000;

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

}  // namespace

TEST(Spd, ConstructorValidates) {
  EXPECT_THROW(SpdMatrix(diag({1, -1})), NotPositiveDefinite);
  Eigen::MatrixXd asym(2, 2);
  asym << 2, 1, 0, 2;
  EXPECT_THROW(SpdMatrix{asym}, NotPositiveDefinite);
  EXPECT_THROW(SpdMatrix(Eigen::MatrixXd(2, 3)), DimensionMismatch);
}

TEST(Spd, ExpmLogmExamples) {
  EXPECT_LE((sym_expm(Eigen::MatrixXd::Zero(3, 3)).matrix() - Eigen::MatrixXd::Identity(3, 3)).norm(),
            0.0);
  // Scalar exponential on the diagonal.
  const Eigen::MatrixXd e = sym_expm(diag({std::log(2.0), std::log(3.0)})).matrix();
  EXPECT_LE((e - diag({2.0, 3.0})).norm(), 1e-14);
  EXPECT_THROW(sym_logm(diag({1.0, 1e-13})), NotPositiveDefinite);
  EXPECT_THROW(sym_logm(diag({1.0, -2.0})), NotPositiveDefinite);
}

TEST(Spd, ExpmLogmRoundTrip) {
  Rng rng(21);
  for (int i = 0; i < kCases; ++i) {
    const int d = (i % 3 == 0) ? 2 : (i % 3 == 1 ? 3 : 6);
    const Eigen::MatrixXd s = test::random_symmetric(rng, d, -2.0, 2.0);
    ASSERT_LE((sym_logm(sym_expm(s)) - s).norm(), 1e-9);
  }
}

TEST(Spd, ExpExamples) {
  Rng rng(22);
  const SpdMatrix sigma = test::random_spd(rng, 3);
  EXPECT_LE((spd_exp(sigma, Eigen::MatrixXd::Zero(3, 3)).matrix() - sigma.matrix()).norm(), 1e-12);

  const Eigen::MatrixXd s = test::random_symmetric(rng, 3, -1.0, 1.0);
  EXPECT_LE((spd_exp(SpdMatrix::identity(3), s).matrix() - sym_expm(s).matrix()).norm(), 1e-12);

  // Diagonal case, scalar arithmetic: sigma_i * exp(w_i / sigma_i).
  const SpdMatrix base(diag({4.0, 1.0}));
  const Eigen::MatrixXd w = diag({std::log(2.0) * 4.0, 0.0});
  const Eigen::MatrixXd expected = diag({4.0 * std::exp(std::log(2.0) * 4.0 / 4.0), 1.0});
  EXPECT_LE((spd_exp(base, w).matrix() - expected).norm(), 1e-13);
  EXPECT_NEAR(expected(0, 0), 8.0, 1e-14);
}

TEST(Spd, LogExamples) {
  Rng rng(23);
  const SpdMatrix sigma = test::random_spd(rng, 3);
  EXPECT_LE(spd_log(sigma, sigma).norm(), 1e-12);
  const SpdMatrix w = test::random_spd(rng, 3);
  EXPECT_LE((spd_log(SpdMatrix::identity(3), w) - sym_logm(w)).norm(), 1e-12);
}

TEST(Spd, ExpLogRoundTripGlobal) {
  Rng rng(24);
  for (int i = 0; i < kCases; ++i) {
    const int d = (i % 2 == 0) ? 3 : 6;
    const SpdMatrix base = test::random_spd(rng, d);
    const SpdMatrix target = test::random_spd(rng, d);
    const SpdMatrix back = spd_exp(base, spd_log(base, target));
    ASSERT_LE((back.matrix() - target.matrix()).norm(), 1e-8) << "case " << i;
  }
}

TEST(Spd, ExpOutputIsPositiveDefinite) {
  Rng rng(25);
  for (int i = 0; i < 2000; ++i) {
    const SpdMatrix base = test::random_spd(rng, 3);
    // Keeps base^{-1/2} t base^{-1/2} within a spectrum of +-10 so expm stays representable.
    const Eigen::MatrixXd t = test::random_symmetric(rng, 3, -1.0, 1.0);
    const SpdMatrix out = spd_exp(base, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(out.matrix());
    ASSERT_GT(e.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Spd, TransportExamples) {
  Rng rng(26);
  const SpdMatrix sigma = test::random_spd(rng, 3);
  const Eigen::MatrixXd t = test::random_symmetric(rng, 3, -1.0, 1.0);
  EXPECT_LE((spd_transport(sigma, sigma, t) - t).norm(), 1e-12);

  const SpdMatrix w = test::random_spd(rng, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(w.matrix());
  const Eigen::MatrixXd root = e.operatorSqrt();
  EXPECT_LE((spd_transport(SpdMatrix::identity(3), w, t) - root * t * root).norm(), 1e-12);
}

TEST(Spd, TransportPreservesAffineInvariantInnerProduct) {
  Rng rng(27);
  for (int i = 0; i < kCases; ++i) {
    const SpdMatrix a = test::random_spd(rng, 3);
    const SpdMatrix b = test::random_spd(rng, 3);
    const Eigen::MatrixXd t1 = test::random_symmetric(rng, 3, -1.0, 1.0);
    const Eigen::MatrixXd t2 = test::random_symmetric(rng, 3, -1.0, 1.0);
    const double before = spd_inner(a, t1, t2);
    const double after = spd_inner(b, spd_transport(a, b, t1), spd_transport(a, b, t2));
    ASSERT_NEAR(after, before, 1e-8 * std::max(1.0, std::abs(before)));
  }
}

TEST(Spd, DistanceExamples) {
  Rng rng(28);
  const SpdMatrix sigma = test::random_spd(rng, 3);
  EXPECT_NEAR(spd_distance(sigma, sigma), 0.0, 1e-12);
  // logm(diag(e, 1)) = diag(1, 0); Frobenius norm 1.
  EXPECT_NEAR(spd_distance(SpdMatrix::identity(2), SpdMatrix(diag({std::exp(1.0), 1.0}))), 1.0, 1e-14);
}

TEST(Spd, DistanceAxiomsAndAffineInvariance) {
  Rng rng(29);
  for (int i = 0; i < kCases; ++i) {
    const SpdMatrix a = test::random_spd(rng, 3);
    const SpdMatrix b = test::random_spd(rng, 3);
    const SpdMatrix c = test::random_spd(rng, 3);
    const double ab = spd_distance(a, b);
    ASSERT_GE(ab, 0.0);
    ASSERT_NEAR(ab, spd_distance(b, a), 1e-9);
    ASSERT_LE(spd_distance(a, c), ab + spd_distance(b, c) + 1e-9);

    Eigen::MatrixXd g = test::gaussian_vector(rng, 9).reshaped(3, 3);
    g += 2.0 * Eigen::MatrixXd::Identity(3, 3);  // keep it well away from singular
    const SpdMatrix ga(g * a.matrix() * g.transpose());
    const SpdMatrix gb(g * b.matrix() * g.transpose());
    ASSERT_NEAR(spd_distance(ga, gb), ab, 1e-8);
  }
}

TEST(Spd, DimensionMismatchThrows) {
  EXPECT_THROW(spd_distance(SpdMatrix::identity(2), SpdMatrix::identity(3)), DimensionMismatch);
  EXPECT_THROW(spd_exp(SpdMatrix::identity(2), Eigen::MatrixXd::Zero(3, 3)), DimensionMismatch);
}
