#pragma once

#include <Eigen/Dense>
#include <memory>
#include <numbers>
#include <vector>

#include "geomrl/env/environment.hpp"
#include "geomrl/errors.hpp"
#include "geomrl/manifold/composite.hpp"

namespace geomrl {

/// Tracking task over a sequence of manifold targets. The policy's action at
/// step t is the predicted point for targets[t]; it also becomes the next
/// state. Per-step reward exp(-d), mean distance summed over factors.
class TrajectoryEnv : public Environment {
 public:
  TrajectoryEnv(CompositePoint initial, std::vector<CompositePoint> targets)
      : initial_(std::move(initial)), targets_(std::move(targets)), state_(initial_) {
    if (targets_.empty()) throw Error("trajectory: at least one target is required");
    for (const auto& t : targets_) {
      if (t.layout() != initial_.layout()) {
        throw KindMismatch("trajectory: target factor kinds differ from the initial state");
      }
    }
  }

  Layout action_layout() const override { return initial_.layout(); }
  FrameMode frame_mode() const override { return FrameMode::kTrajectory; }
  int horizon() const override { return static_cast<int>(targets_.size()); }

  void reset() override {
    state_ = initial_;
    t_ = 0;
  }

  const CompositePoint& state() const override { return state_; }

  // Flattened current state followed by the normalized time index.
  Eigen::VectorXd observation() const override {
    const Eigen::VectorXd s = flatten(state_);
    Eigen::VectorXd out(s.size() + 1);
    out << s, static_cast<double>(t_) / horizon();
    return out;
  }

  StepResult step(const CompositePoint& action) override {
    if (t_ >= horizon()) throw Error("trajectory: step after episode end");
    CompositePoint a = canonical_action(action);
    const Eigen::VectorXd d = composite_distances(targets_[static_cast<std::size_t>(t_)], a);
    StepResult r;
    r.distance = d.mean();
    r.reward = std::exp(-d.sum());
    state_ = std::move(a);
    ++t_;
    r.done = t_ == horizon();
    return r;
  }

  const CompositePoint& initial() const { return initial_; }
  const std::vector<CompositePoint>& targets() const { return targets_; }
  int time_index() const { return t_; }

 protected:
  static CompositePoint canonical_action(const CompositePoint& action) {
    std::vector<FactorPoint> f = action.factors();
    for (auto& p : f) {
      if (auto* q = std::get_if<UnitQuaternion>(&p)) *q = hemisphere_flip(*q);
    }
    return CompositePoint(std::move(f));
  }

 private:
  CompositePoint initial_;
  std::vector<CompositePoint> targets_;
  CompositePoint state_;
  int t_ = 0;
};

/// Orientation tracking on S3.
class QuatTrajEnv final : public TrajectoryEnv {
 public:
  QuatTrajEnv(const UnitQuaternion& initial, const std::vector<UnitQuaternion>& targets)
      : TrajectoryEnv(CompositePoint({initial}), wrap(targets)) {
    const UnitQuaternion* prev = &initial;
    for (const auto& q : targets) {
      if (!q.is_canonical()) throw Error("quat trajectory: target outside the canonical hemisphere");
      if (s3_distance(*prev, q) >= std::numbers::pi / 2) {
        throw Error("quat trajectory: consecutive targets are pi/2 or more apart");
      }
      prev = &q;
    }
  }

  std::string id() const override { return "quat_traj"; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<QuatTrajEnv>(*this); }

 private:
  static std::vector<CompositePoint> wrap(const std::vector<UnitQuaternion>& qs) {
    std::vector<CompositePoint> out;
    out.reserve(qs.size());
    for (const auto& q : qs) out.push_back(CompositePoint({q}));
    return out;
  }
};

/// SPD (manipulability / stiffness) tracking.
class SpdTrajEnv final : public TrajectoryEnv {
 public:
  SpdTrajEnv(const SpdMatrix& initial, const std::vector<SpdMatrix>& targets)
      : TrajectoryEnv(CompositePoint({initial}), wrap(targets)) {}

  std::string id() const override { return "spd_traj"; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<SpdTrajEnv>(*this); }

 private:
  static std::vector<CompositePoint> wrap(const std::vector<SpdMatrix>& ws) {
    std::vector<CompositePoint> out;
    out.reserve(ws.size());
    for (const auto& w : ws) out.push_back(CompositePoint({w}));
    return out;
  }
};

}  // namespace geomrl
