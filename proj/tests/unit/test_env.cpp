#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "geomrl/env/generators.hpp"
#include "geomrl/env/targets_io.hpp"
#include "geomrl/env/trajectory.hpp"
#include "geomrl/env/wahba.hpp"
#include "test_util.hpp"

using namespace geomrl;
using geomrl::test::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

UnitQuaternion about_z(double angle) {
  return UnitQuaternion(Eigen::Vector4d(std::cos(angle / 2), 0, 0, std::sin(angle / 2)));
}

QuatWahbaEnv single_quat_env(const UnitQuaternion& target, RewardKind kind) {
  QuatWahbaInstance w{Eigen::MatrixXd(1, 3), Eigen::MatrixXd(1, 3), target};
  w.y << 1, 0, 0;
  w.z = w.y * target.rotation_matrix().transpose();
  return QuatWahbaEnv({w}, kind);
}

}  // namespace

TEST(WahbaCost, ZeroAtTarget) {
  auto env = QuatWahbaEnv::generate(11, 3, 7, RewardKind::kNegDist);
  for (const auto& inst : env.instances()) EXPECT_NEAR(wahba_cost(inst.target, inst), 0.0, 1e-24);
}

TEST(WahbaCost, QuarterTurnAboutZ) {
  const auto env = single_quat_env(about_z(kPi / 2), RewardKind::kNegDist);
  EXPECT_NEAR(wahba_cost(UnitQuaternion::identity(), env.instances()[0]), 1.0, 1e-14);
}

TEST(WahbaCost, SignFlipInvariant) {
  Rng rng(3);
  auto env = QuatWahbaEnv::generate(5, 1, 6, RewardKind::kNegDist, 0.05);
  for (int i = 0; i < 200; ++i) {
    const auto q = test::random_quaternion(rng);
    EXPECT_NEAR(wahba_cost(q, env.instances()[0]), wahba_cost(-q, env.instances()[0]), 1e-12);
  }
}

TEST(QuatWahba, GeneratedDataIsConsistent) {
  auto env = QuatWahbaEnv::generate(9, 4, 5, RewardKind::kNegDist);
  for (const auto& inst : env.instances()) {
    EXPECT_EQ(inst.y.rows(), 5);
    EXPECT_TRUE(inst.target.is_canonical());
    for (Eigen::Index k = 0; k < inst.y.rows(); ++k) {
      EXPECT_NEAR(inst.y.row(k).norm(), 1.0, 1e-14);
      const Eigen::Vector3d z = inst.target.rotation_matrix() * inst.y.row(k).transpose();
      EXPECT_LT((z - inst.z.row(k).transpose()).norm(), 1e-14);
    }
  }
  EXPECT_EQ(env.observation().size(), 4 * 2 * 5 * 3);
  EXPECT_EQ(env.action_layout().size(), 4u);
  EXPECT_EQ(env.horizon(), 1);
}

TEST(QuatWahba, StepRewards) {
  const auto target = about_z(0.7);
  auto neg = single_quat_env(target, RewardKind::kNegDist);
  auto ex = single_quat_env(target, RewardKind::kExpNegDist);
  EXPECT_NEAR(quat_wahba_step(neg, target).reward, 0.0, 1e-15);
  EXPECT_NEAR(quat_wahba_step(ex, target).reward, 1.0, 1e-15);
  EXPECT_TRUE(quat_wahba_step(ex, target).done);

  // Orthogonal in R^4 means geodesic distance pi/2.
  const Eigen::Vector4d t = target.coeffs();
  const UnitQuaternion ortho(Eigen::Vector4d(-t[3], t[2], -t[1], t[0]));
  ASSERT_NEAR(t.dot(ortho.coeffs()), 0.0, 1e-15);
  EXPECT_NEAR(quat_wahba_step(neg, ortho).reward, -kPi / 2, 1e-12);
  EXPECT_NEAR(quat_wahba_step(ex, ortho).reward, std::exp(-kPi / 2), 1e-12);
}

TEST(QuatWahba, NegatedActionScoresLikeTheAction) {
  const auto target = about_z(1.1);
  auto env = single_quat_env(target, RewardKind::kNegDist);
  const UnitQuaternion a = about_z(0.4);
  EXPECT_DOUBLE_EQ(quat_wahba_step(env, a).reward, quat_wahba_step(env, -a).reward);
}

TEST(QuatWahba, NoCandidateBeatsTheTarget) {
  Rng rng(2024);
  auto env = QuatWahbaEnv::generate(77, 1, 5, RewardKind::kExpNegDist);
  const auto& target = env.instances()[0].target;
  const double best = quat_wahba_step(env, target).reward;
  for (int i = 0; i < 10000; ++i) {
    const auto q = test::random_quaternion(rng);
    const double r = quat_wahba_step(env, q).reward;
    if (s3_distance(q, target) > 1e-9) {
      EXPECT_LT(r, best);
    }
  }
}

TEST(QuatWahba, RewardBounds) {
  Rng rng(5);
  auto neg = QuatWahbaEnv::generate(1, 1, 5, RewardKind::kNegDist);
  auto ex = QuatWahbaEnv::generate(1, 1, 5, RewardKind::kExpNegDist);
  for (int i = 0; i < 2000; ++i) {
    const auto q = test::random_quaternion(rng);
    const double rn = quat_wahba_step(neg, q).reward;
    const double re = quat_wahba_step(ex, q).reward;
    EXPECT_LE(rn, 0.0);
    EXPECT_GE(rn, -kPi);
    EXPECT_GT(re, 0.0);
    EXPECT_LE(re, 1.0);
  }
}

TEST(QuatWahba, SizeSumsRewards) {
  auto env = QuatWahbaEnv::generate(31, 3, 5, RewardKind::kExpNegDist);
  std::vector<FactorPoint> f;
  for (const auto& inst : env.instances()) f.emplace_back(inst.target);
  const auto r = env.step(CompositePoint(std::move(f)));
  EXPECT_NEAR(r.reward, 3.0, 1e-14);
  EXPECT_NEAR(r.distance, 0.0, 1e-14);
}

TEST(QuatWahba, GenerationIsDeterministic) {
  auto a = QuatWahbaEnv::generate(123, 2, 5, RewardKind::kNegDist, 0.1);
  auto b = QuatWahbaEnv::generate(123, 2, 5, RewardKind::kNegDist, 0.1);
  auto c = QuatWahbaEnv::generate(124, 2, 5, RewardKind::kNegDist, 0.1);
  EXPECT_EQ(a.observation(), b.observation());
  EXPECT_NE(a.observation(), c.observation());
}

TEST(SpdWahba, StepRewards) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Identity(3, 3);
  const SpdMatrix target(Eigen::Vector3d(std::exp(1.0), 1, 1).asDiagonal().toDenseMatrix());
  SpdWahbaEnv env({SpdWahbaInstance{y, y * target.matrix(), target}});
  EXPECT_NEAR(spd_wahba_step(env, target).reward, 0.0, 1e-14);
  EXPECT_NEAR(spd_wahba_step(env, SpdMatrix::identity(3)).reward, -1.0, 1e-14);
  EXPECT_TRUE(spd_wahba_step(env, target).done);
}

TEST(SpdWahba, CongruenceInvariance) {
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const auto w = test::random_spd(rng, 3);
    const auto a = test::random_spd(rng, 3);
    Eigen::MatrixXd g(3, 3);
    do {
      for (int k = 0; k < 9; ++k) g.data()[k] = std::normal_distribution<double>(0, 1)(rng);
    } while (std::abs(g.determinant()) < 0.1);
    const SpdMatrix wg(g * w.matrix() * g.transpose());
    const SpdMatrix ag(g * a.matrix() * g.transpose());
    const Eigen::MatrixXd y = Eigen::MatrixXd::Identity(3, 3);
    SpdWahbaEnv e1({SpdWahbaInstance{y, w.matrix(), w}});
    SpdWahbaEnv e2({SpdWahbaInstance{y, wg.matrix(), wg}});
    EXPECT_NEAR(spd_wahba_step(e1, a).reward, spd_wahba_step(e2, ag).reward, 1e-8);
  }
}

TEST(SpdWahba, GeneratedTargetsAndForces) {
  auto env = SpdWahbaEnv::generate(4, 5, 3, 6);
  EXPECT_EQ(env.action_layout().size(), 5u);
  for (const auto& inst : env.instances()) {
    const Eigen::VectorXd l = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(inst.target.matrix()).eigenvalues();
    EXPECT_GE(l.minCoeff(), 0.25 - 1e-12);
    EXPECT_LE(l.maxCoeff(), 4.0 + 1e-12);
    for (Eigen::Index k = 0; k < inst.y.rows(); ++k) {
      const Eigen::Vector3d f = inst.target.matrix() * inst.y.row(k).transpose();
      EXPECT_LT((f - inst.z.row(k).transpose()).norm(), 1e-13);
    }
  }
}

TEST(QuatTraj, PerfectTrackingReturnsHorizon) {
  const auto pts = gen_quat_traj(3, 51, 0.03);
  QuatTrajEnv env(pts.front(), {pts.begin() + 1, pts.end()});
  env.reset();
  double ret = 0.0;
  for (int t = 0; t < env.horizon(); ++t) {
    const auto r = env.step(CompositePoint({pts[static_cast<std::size_t>(t + 1)]}));
    ret += r.reward;
    EXPECT_EQ(r.done, t + 1 == env.horizon());
  }
  EXPECT_NEAR(ret, 50.0, 1e-12);
}

TEST(QuatTraj, ConstantActionOnMovingTarget) {
  const auto pts = gen_quat_traj(4, 51, 0.03);
  QuatTrajEnv env(pts.front(), {pts.begin() + 1, pts.end()});
  env.reset();
  double ret = 0.0, oracle = 0.0;
  for (int t = 0; t < env.horizon(); ++t) {
    ret += env.step(CompositePoint({pts[1]})).reward;
    oracle += std::exp(-s3_distance(pts[static_cast<std::size_t>(t + 1)], pts[1]));
  }
  EXPECT_LT(ret, 50.0);
  EXPECT_NEAR(ret, oracle, 1e-12);
}

TEST(QuatTraj, StateFollowsCanonicalAction) {
  const auto pts = gen_quat_traj(5, 4, 0.03);
  QuatTrajEnv env(pts.front(), {pts.begin() + 1, pts.end()});
  env.reset();
  env.step(CompositePoint({-pts[1]}));
  EXPECT_EQ(env.state().get<UnitQuaternion>(0).coeffs(), pts[1].coeffs());
  env.reset();
  EXPECT_EQ(env.state().get<UnitQuaternion>(0).coeffs(), pts[0].coeffs());
}

TEST(QuatTraj, RejectsInvalidTargets) {
  const auto id = UnitQuaternion::identity();
  EXPECT_THROW(QuatTrajEnv(id, {about_z(2.0 * kPi - 0.2)}), Error);  // w < 0
  EXPECT_THROW(QuatTrajEnv(id, {about_z(0.5), about_z(0.5 + 3.2)}), Error);
  EXPECT_NO_THROW(QuatTrajEnv(id, {about_z(0.5), about_z(1.0)}));
}

TEST(QuatTraj, ReturnWithinBounds) {
  Rng rng(6);
  const auto pts = gen_quat_traj(6, 21, 0.05);
  QuatTrajEnv env(pts.front(), {pts.begin() + 1, pts.end()});
  env.reset();
  double ret = 0.0;
  for (int t = 0; t < env.horizon(); ++t) ret += env.step(CompositePoint({test::random_quaternion(rng)})).reward;
  EXPECT_GT(ret, 0.0);
  EXPECT_LE(ret, 20.0);
}

TEST(SpdTraj, TrackingOracle) {
  Rng rng(12);
  const auto pts = gen_spd_traj(8, 11, 3, 1.0);
  SpdTrajEnv env(pts.front(), {pts.begin() + 1, pts.end()});
  env.reset();
  double ret = 0.0, oracle = 0.0;
  for (int t = 0; t < env.horizon(); ++t) {
    const auto a = test::random_spd(rng, 3);
    const auto r = env.step(CompositePoint({a}));
    ret += r.reward;
    const double d = spd_distance(pts[static_cast<std::size_t>(t + 1)], a);
    EXPECT_NEAR(r.distance, d, 1e-15);
    oracle += std::exp(-d);
  }
  EXPECT_NEAR(ret, oracle, 1e-12);
  EXPECT_THROW(env.step(CompositePoint({pts[0]})), Error);
}

TEST(Generators, QuatAmplitudeZeroIsConstant) {
  const auto pts = gen_quat_traj(1, 30, 0.0);
  for (const auto& q : pts) EXPECT_EQ(q.coeffs(), UnitQuaternion::identity().coeffs());
}

TEST(Generators, QuatStepBoundAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = gen_quat_traj(seed, 51, 0.03);
    const auto b = gen_quat_traj(seed, 51, 0.03);
    ASSERT_EQ(a.size(), 51u);
    double largest = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
      EXPECT_EQ(a[t].coeffs(), b[t].coeffs());
      EXPECT_TRUE(a[t].is_canonical());
      if (t) largest = std::max(largest, s3_distance(a[t - 1], a[t]));
    }
    EXPECT_LE(largest, 0.03 + 1e-12);
    EXPECT_GT(largest, 0.03 - 1e-9);  // the bound is attained by construction
  }
  EXPECT_NE(gen_quat_traj(1, 10, 0.03).back().coeffs(), gen_quat_traj(2, 10, 0.03).back().coeffs());
}

TEST(Generators, QuatLeavingHemisphereThrows) {
  EXPECT_THROW(gen_quat_traj(0, 400, 0.3), Error);
}

TEST(Generators, SpdSpectrumStaysInSpreadBand) {
  for (double spread : {0.5, 1.0, 3.0}) {
    const auto pts = gen_spd_traj(17, 51, 3, spread);
    for (const auto& w : pts) {
      const Eigen::VectorXd l = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(w.matrix()).eigenvalues();
      EXPECT_GE(l.minCoeff(), 0.5 * spread * (1 - 1e-10));
      EXPECT_LE(l.maxCoeff(), 2.0 * spread * (1 + 1e-10));
    }
  }
}

TEST(Generators, SpdSingleControlPointIsConstant) {
  const auto pts = gen_spd_traj(2, 10, 3, 1.0, 1);
  for (const auto& w : pts) EXPECT_EQ(w.matrix(), pts.front().matrix());
}

TEST(Generators, SpdSmoothnessBound) {
  const int count = 51, k = 5;
  const auto pts = gen_spd_traj(21, count, 3, 1.0, k);
  const auto ctrl = gen_spd_traj(21, k, 3, 1.0, k);  // hits every control point exactly
  double seg = 0.0;
  for (int i = 0; i + 1 < k; ++i) seg = std::max(seg, spd_distance(ctrl[static_cast<std::size_t>(i)], ctrl[static_cast<std::size_t>(i + 1)]));
  // smoothstep has peak slope 1.5; each step advances (k-1)/(count-1) segments
  const double bound = 1.5 * seg * (k - 1) / (count - 1.0);
  for (std::size_t t = 1; t < pts.size(); ++t) EXPECT_LE(spd_distance(pts[t - 1], pts[t]), bound + 1e-9);
  const auto again = gen_spd_traj(21, count, 3, 1.0, k);
  for (std::size_t t = 0; t < pts.size(); ++t) EXPECT_EQ(pts[t].matrix(), again[t].matrix());
}

TEST(TargetsIo, QuaternionRoundTripIsExact) {
  const auto pts = gen_quat_traj(9, 25, 0.04);
  std::stringstream ss;
  write_quats(ss, pts);
  const auto back = quats_from_table(read_table(ss));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i].coeffs(), pts[i].coeffs());
}

TEST(TargetsIo, SpdRoundTripIsExact) {
  const auto pts = gen_spd_traj(9, 12, 3, 2.0);
  std::stringstream ss;
  write_spds(ss, pts);
  const auto back = spds_from_table(read_table(ss));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i].matrix(), pts[i].matrix());
}

TEST(TargetsIo, CommentsAndErrors) {
  std::stringstream ok("# header\n\n1 0 0 0\n  0.6 0.8 0 0\n");
  EXPECT_EQ(quats_from_table(read_table(ok)).size(), 2u);
  std::stringstream bad_count("1 0 0\n");
  EXPECT_THROW(quats_from_table(read_table(bad_count)), BadLength);
  std::stringstream bad_num("1 0 x 0\n");
  EXPECT_THROW(read_table(bad_num), Error);
  std::stringstream not_square("1 0 0 1 2\n");
  EXPECT_THROW(spds_from_table(read_table(not_square)), BadLength);
  std::stringstream not_spd("1 2 2 1\n");
  EXPECT_THROW(spds_from_table(read_table(not_spd)), NotPositiveDefinite);
}

TEST(Environment, CloneIsIndependent) {
  const auto pts = gen_spd_traj(1, 6, 2, 1.0);
  SpdTrajEnv env(pts.front(), {pts.begin() + 1, pts.end()});
  env.reset();
  auto copy = env.clone();
  env.step(CompositePoint({pts[1]}));
  EXPECT_EQ(copy->state().get<SpdMatrix>(0).matrix(), pts[0].matrix());
  EXPECT_EQ(copy->id(), "spd_traj");
}
