#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <vector>

#include "geomrl/env/environment.hpp"
#include "geomrl/manifold/composite.hpp"
#include "geomrl/manifold/sampling.hpp"
#include "geomrl/random.hpp"

namespace geomrl {

/// One rotation-fitting instance: unit observation vectors Y (rows), their
/// rotated counterparts Z_k = R(Q*) Y_k (+ optional noise) and the target.
struct QuatWahbaInstance {
  Eigen::MatrixXd y;  // N x 3
  Eigen::MatrixXd z;  // N x 3
  UnitQuaternion target;
};

/// Spring-stiffness instance: displacements Y, forces Z_k = W* Y_k.
struct SpdWahbaInstance {
  Eigen::MatrixXd y;
  Eigen::MatrixXd z;
  SpdMatrix target;
};

/// J(R) = 1/2 sum_k a_k |z_k - R y_k|^2 with a_k = 1.
inline double wahba_cost(const UnitQuaternion& q, const QuatWahbaInstance& inst) {
  const Eigen::Matrix3d r = q.rotation_matrix();
  double j = 0.0;
  for (Eigen::Index k = 0; k < inst.y.rows(); ++k) {
    const Eigen::Vector3d yk = inst.y.row(k).transpose();
    const Eigen::Vector3d zk = inst.z.row(k).transpose();
    j += 0.5 * (zk - r * yk).squaredNorm();
  }
  return j;
}

namespace detail {

inline Eigen::MatrixXd random_unit_rows(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd y(n, 3);
  for (int k = 0; k < n; ++k) {
    Eigen::Vector3d v(g(rng), g(rng), g(rng));
    y.row(k) = v.normalized().transpose();
  }
  return y;
}

inline Eigen::VectorXd flatten_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a.transpose().reshaped(), b.transpose().reshaped();
  return out;
}

}  // namespace detail

/// Single-step quaternion Wahba task of a given size: `size` independent
/// targets predicted jointly as one S3^size action. The step reward is the
/// sum of the per-target rewards -d or exp(-d).
class QuatWahbaEnv final : public Environment {
 public:
  QuatWahbaEnv(std::vector<QuatWahbaInstance> instances, RewardKind reward)
      : instances_(std::move(instances)), reward_(reward) {
    std::vector<FactorPoint> ref(instances_.size(), UnitQuaternion::identity());
    reference_ = CompositePoint(std::move(ref));
  }

  static QuatWahbaEnv generate(std::uint64_t seed, int size, int observations, RewardKind reward,
                               double noise_std = 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<QuatWahbaInstance> inst;
    for (int i = 0; i < size; ++i) {
      QuatWahbaInstance w{detail::random_unit_rows(rng, observations), {}, sampling::random_quaternion(rng)};
      w.z = w.y * w.target.rotation_matrix().transpose();
      if (noise_std > 0.0) {
        for (Eigen::Index k = 0; k < w.z.size(); ++k) w.z.data()[k] += noise_std * noise(rng);
      }
      inst.push_back(std::move(w));
    }
    return QuatWahbaEnv(std::move(inst), reward);
  }

  std::string id() const override { return "quat_wahba"; }
  Layout action_layout() const override { return reference_.layout(); }
  FrameMode frame_mode() const override { return FrameMode::kSingleStep; }
  int horizon() const override { return 1; }
  void reset() override { done_ = false; }
  const CompositePoint& state() const override { return reference_; }

  // Flattened (Y, Z) of every instance.
  Eigen::VectorXd observation() const override {
    std::vector<double> out;
    for (const auto& w : instances_) {
      const Eigen::VectorXd f = detail::flatten_rows(w.y, w.z);
      out.insert(out.end(), f.data(), f.data() + f.size());
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

  StepResult step(const CompositePoint& action) override {
    StepResult r;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      const double d = s3_distance(instances_[i].target, hemisphere_flip(action.get<UnitQuaternion>(i)));
      r.reward += distance_reward(reward_, d);
      r.distance += d;
    }
    r.distance /= static_cast<double>(instances_.size());
    r.done = done_ = true;
    return r;
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<QuatWahbaEnv>(*this); }

  const std::vector<QuatWahbaInstance>& instances() const { return instances_; }
  RewardKind reward_kind() const { return reward_; }

 private:
  std::vector<QuatWahbaInstance> instances_;
  RewardKind reward_;
  CompositePoint reference_;
  bool done_ = false;
};

/// Single-step SPD Wahba task; reward is -sum_i d(W*_i, W_i).
class SpdWahbaEnv final : public Environment {
 public:
  explicit SpdWahbaEnv(std::vector<SpdWahbaInstance> instances) : instances_(std::move(instances)) {
    std::vector<FactorPoint> ref;
    for (const auto& w : instances_) ref.emplace_back(SpdMatrix::identity(w.target.dim()));
    reference_ = CompositePoint(std::move(ref));
  }

  /// Targets have log-uniform eigenvalues in [0.25, 4].
  static SpdWahbaEnv generate(std::uint64_t seed, int size, int dim, int observations) {
    Rng rng(seed);
    std::vector<SpdWahbaInstance> inst;
    for (int i = 0; i < size; ++i) {
      std::normal_distribution<double> g(0.0, 1.0);
      Eigen::MatrixXd y(observations, dim);
      for (Eigen::Index k = 0; k < y.size(); ++k) y.data()[k] = g(rng);
      SpdMatrix target = sampling::random_spd(rng, dim, 0.25, 4.0);
      Eigen::MatrixXd z = y * target.matrix();  // rows: (W y_k)^T, W symmetric
      inst.push_back({std::move(y), std::move(z), std::move(target)});
    }
    return SpdWahbaEnv(std::move(inst));
  }

  std::string id() const override { return "spd_wahba"; }
  Layout action_layout() const override { return reference_.layout(); }
  FrameMode frame_mode() const override { return FrameMode::kSingleStep; }
  int horizon() const override { return 1; }
  void reset() override {}
  const CompositePoint& state() const override { return reference_; }

  Eigen::VectorXd observation() const override {
    std::vector<double> out;
    for (const auto& w : instances_) {
      const Eigen::VectorXd f = detail::flatten_rows(w.y, w.z);
      out.insert(out.end(), f.data(), f.data() + f.size());
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

  StepResult step(const CompositePoint& action) override {
    StepResult r;
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      const double d = spd_distance(instances_[i].target, action.get<SpdMatrix>(i));
      r.reward -= d;
      r.distance += d;
    }
    r.distance /= static_cast<double>(instances_.size());
    r.done = true;
    return r;
  }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<SpdWahbaEnv>(*this); }

  const std::vector<SpdWahbaInstance>& instances() const { return instances_; }

 private:
  std::vector<SpdWahbaInstance> instances_;
  CompositePoint reference_;
};

/// Convenience single-instance step functions.
inline StepResult quat_wahba_step(QuatWahbaEnv& env, const UnitQuaternion& action) {
  return env.step(CompositePoint({action}));
}

inline StepResult spd_wahba_step(SpdWahbaEnv& env, const SpdMatrix& action) {
  return env.step(CompositePoint({action}));
}

}  // namespace geomrl
