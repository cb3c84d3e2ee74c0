#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geomrl/manifold/composite.hpp"
#include "geomrl/manifold/gaussian.hpp"
#include "test_util.hpp"

using namespace geomrl;
using geomrl::test::Rng;

namespace {

CompositePoint random_mixed_point(Rng& rng) {
  return CompositePoint({test::random_quaternion(rng), test::random_spd(rng, 3),
                         Eigen::VectorXd(test::gaussian_vector(rng, 2))});
}

const Layout kMixed = {FactorKind::s3(), FactorKind::spd(3), FactorKind::euclid(2)};

}  // namespace

TEST(Composite, LayoutAndSizes) {
  EXPECT_EQ(tangent_size(kMixed), 4 + 6 + 2);
  const auto base = default_base(kMixed);
  EXPECT_EQ(base.layout(), kMixed);
  const auto t = CompositeTangent::zero(kMixed);
  EXPECT_EQ(t.offset(1), 4);
  EXPECT_EQ(t.offset(2), 10);
  EXPECT_THROW(CompositeTangent(kMixed, Eigen::VectorXd::Zero(11)), BadLength);
}

TEST(Composite, TransportSameFrameIsIdentity) {
  Rng rng(41);
  const auto p = random_mixed_point(rng);
  CompositeTangent t(kMixed, test::gaussian_vector(rng, 12));
  t.segment(0) = s3_project_tangent(p.get<UnitQuaternion>(0), t.segment(0));
  EXPECT_LE((composite_transport(p, p, t).flat() - t.flat()).norm(), 1e-12);
}

TEST(Composite, SingleFactorMatchesScalarOps) {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const auto a = test::random_quaternion(rng);
    const auto b = test::random_quaternion(rng);
    const TangentS3 v = test::random_s3_tangent(rng, a, 1.0);
    const CompositePoint pa({a}), pb({b});
    const CompositeTangent tv({FactorKind::s3()}, v);
    EXPECT_EQ(composite_transport(pa, pb, tv).flat(), Eigen::VectorXd(s3_transport(a, b, v)));
    EXPECT_EQ(composite_exp(pa, tv).get<UnitQuaternion>(0).coeffs(), s3_exp(a, v).coeffs());
    EXPECT_EQ(composite_log(pa, pb).flat(), Eigen::VectorXd(s3_log(a, b)));

    const SpdMatrix sa = test::random_spd(rng, 3), sb = test::random_spd(rng, 3);
    const CompositePoint qa({sa}), qb({sb});
    const Eigen::MatrixXd w = test::random_symmetric(rng, 3, -1, 1);
    const CompositeTangent tw({FactorKind::spd(3)}, mandel_vec(w));
    EXPECT_LE((mandel_unvec(composite_transport(qa, qb, tw).flat()) - spd_transport(sa, sb, w)).norm(),
              1e-12);
    EXPECT_LE((composite_exp(qa, tw).get<SpdMatrix>(0).matrix() - spd_exp(sa, w).matrix()).norm(),
              1e-12);
    EXPECT_LE((mandel_unvec(composite_log(qa, qb).flat()) - spd_log(sa, sb)).norm(), 1e-12);
  }
}

TEST(Composite, EuclideanOnlyPassesThrough) {
  Rng rng(43);
  const Layout l = {FactorKind::euclid(3)};
  const CompositePoint a({Eigen::VectorXd(test::gaussian_vector(rng, 3))});
  const CompositePoint b({Eigen::VectorXd(test::gaussian_vector(rng, 3))});
  const CompositeTangent t(l, test::gaussian_vector(rng, 3));
  EXPECT_EQ(composite_transport(a, b, t).flat(), t.flat());
  EXPECT_EQ(composite_exp(a, t).get<Eigen::VectorXd>(0), a.get<Eigen::VectorXd>(0) + t.flat());
}

TEST(Composite, ZeroTangentReturnsBase) {
  Rng rng(44);
  const auto p = random_mixed_point(rng);
  const auto q = composite_exp(p, CompositeTangent::zero(kMixed));
  EXPECT_LE(composite_distances(p, q).maxCoeff(), 1e-12);
}

TEST(Composite, MixedRoundTrip) {
  Rng rng(45);
  for (int i = 0; i < 1000; ++i) {
    const auto base = random_mixed_point(rng);
    auto target = random_mixed_point(rng);
    // Keep the S3 factor within the injectivity radius.
    const auto& b0 = base.get<UnitQuaternion>(0);
    target[0] = s3_exp(b0, test::random_s3_tangent(rng, b0, std::numbers::pi - 0.1));
    const auto back = composite_exp(base, composite_log(base, target));
    ASSERT_LE(composite_distances(back, target).maxCoeff(), 1e-8);
  }
}

TEST(Composite, KindMismatchThrows) {
  const CompositePoint a({UnitQuaternion::identity()});
  const CompositePoint b({SpdMatrix::identity(3)});
  EXPECT_THROW(composite_log(a, b), KindMismatch);
  EXPECT_THROW(composite_transport(a, a, CompositeTangent::zero({FactorKind::euclid(4)})), KindMismatch);
}

TEST(Gaussian, PeakValue) {
  Rng rng(46);
  const auto mean = random_mixed_point(rng);
  const Eigen::MatrixXd cov = test::random_spd(rng, 12, 0.5, 2.0).matrix();
  const double expected =
      -0.5 * std::log(std::pow(2.0 * std::numbers::pi, 12) * cov.determinant());
  EXPECT_NEAR(riemannian_gaussian_logpdf(mean, cov, mean), expected, 1e-10);
}

TEST(Gaussian, DecreasesWithS3Distance) {
  Rng rng(47);
  const auto m = test::random_quaternion(rng);
  const TangentS3 dir = test::random_s3_tangent(rng, m, 1.0).normalized();
  const CompositePoint mean({m});
  double prev = riemannian_gaussian_logpdf(mean, Eigen::Matrix4d::Identity(), mean);
  for (double r = 0.1; r < 3.0; r += 0.1) {
    const double cur = riemannian_gaussian_logpdf(mean, Eigen::Matrix4d::Identity(),
                                                  CompositePoint({s3_exp(m, dir * r)}));
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(Gaussian, EuclideanMatchesMultivariateNormal) {
  Rng rng(48);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd mu = test::gaussian_vector(rng, 3);
    const Eigen::VectorXd x = test::gaussian_vector(rng, 3);
    const Eigen::MatrixXd cov = test::random_spd(rng, 3, 0.2, 3.0).matrix();
    const Eigen::VectorXd r = x - mu;
    const double density = std::exp(-0.5 * r.dot(cov.inverse() * r)) /
                           std::sqrt(std::pow(2.0 * std::numbers::pi, 3) * cov.determinant());
    EXPECT_NEAR(riemannian_gaussian_logpdf(CompositePoint({mu}), cov, CompositePoint({x})),
                std::log(density), 1e-10);
  }
}
