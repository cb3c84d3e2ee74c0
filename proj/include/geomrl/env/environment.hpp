#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "geomrl/manifold/composite.hpp"
#include "geomrl/policy/frame.hpp"

namespace geomrl {

enum class RewardKind { kNegDist, kExpNegDist };

inline double distance_reward(RewardKind kind, double d) {
  return kind == RewardKind::kNegDist ? -d : std::exp(-d);
}

struct StepResult {
  double reward = 0.0;
  bool done = false;
  double distance = 0.0;  // mean geodesic error of this step's prediction(s)
};

/// Episodic task over a composite action manifold.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual Layout action_layout() const = 0;
  virtual FrameMode frame_mode() const = 0;
  virtual int horizon() const = 0;

  virtual void reset() = 0;
  // Manifold state s_t; for single-step tasks the fixed reference point.
  virtual const CompositePoint& state() const = 0;
  virtual Eigen::VectorXd observation() const = 0;
  virtual StepResult step(const CompositePoint& action) = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace geomrl
