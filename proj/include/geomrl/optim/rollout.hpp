#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "geomrl/env/environment.hpp"
#include "geomrl/errors.hpp"
#include "geomrl/manifold/repair_counter.hpp"
#include "geomrl/policy/adapter.hpp"
#include "geomrl/policy/features.hpp"
#include "geomrl/policy/frame.hpp"
#include "geomrl/policy/policy.hpp"

namespace geomrl {

struct StepRecord {
  CompositePoint state;
  CompositeTangent tangent_action;  // a_L for GRL, the raw output for baselines
  CompositePoint manifold_action;
  double reward = 0.0;
  double distance = 0.0;
};

struct Rollout {
  std::vector<StepRecord> steps;
  double return_ = 0.0;
  Eigen::MatrixXd noise;  // parameter perturbation eps; empty for deterministic runs
  int repairs = 0;              // as reported by the adapter
  std::uint64_t repair_calls = 0;  // normalization / nearest-SPD calls made while mapping actions
  int factor_actions = 0;       // manifold factors produced over the episode
  bool failed = false;

  double mean_distance() const {
    if (steps.empty()) return 0.0;
    double s = 0.0;
    for (const auto& st : steps) s += st.distance;
    return s / static_cast<double>(steps.size());
  }
};

/// Initial frame for an environment: base_L at the reset state, base_P at
/// `base_p` when given and at the reset state otherwise.
inline TangentFrame initial_frame(Environment& env, const CompositePoint* base_p = nullptr) {
  env.reset();
  return TangentFrame(base_p ? *base_p : env.state(), env.state(), env.frame_mode());
}

/// Runs one episode with fixed parameters `theta`. Geometric failures
/// (antipodal log, zero-norm normalization, loss of definiteness) and
/// non-finite rewards end the episode; its return is then `failure_return`
/// and `failed` is set.
inline Rollout run_episode(Environment& env, const Eigen::MatrixXd& theta, const FeatureMap& features,
                           const ActionAdapter& adapter, const TangentFrame& frame0, double failure_return) {
  Rollout out;
  const Layout layout = env.action_layout();
  const int horizon = env.horizon();
  out.steps.reserve(static_cast<std::size_t>(horizon));
  env.reset();
  TangentFrame frame = frame0;
  try {
    for (int t = 0; t < horizon; ++t) {
      StepRecord rec;
      rec.state = env.state();
      const Eigen::VectorXd phi = features.evaluate(t, horizon, rec.state);
      const CompositeTangent a_p = policy_mean_with(theta, layout, phi);
      const std::uint64_t before = repair_calls();
      AdapterOutput mapped = adapter.map(frame, a_p);
      out.repair_calls += repair_calls() - before;
      out.repairs += mapped.repairs;
      out.factor_actions += static_cast<int>(layout.size());
      const StepResult r = env.step(mapped.action);
      if (!std::isfinite(r.reward)) throw NonFiniteReturn("run_episode: non-finite reward");
      rec.tangent_action = std::move(mapped.local_tangent);
      rec.manifold_action = std::move(mapped.action);
      rec.reward = r.reward;
      rec.distance = r.distance;
      out.return_ += r.reward;
      out.steps.push_back(std::move(rec));
      frame = frame_update(frame, env.state());
      if (r.done) break;
    }
  } catch (const AntipodalError&) {
    out.failed = true;
  } catch (const ZeroNormError&) {
    out.failed = true;
  } catch (const NotPositiveDefinite&) {
    out.failed = true;
  } catch (const NonFiniteReturn&) {
    out.failed = true;
  }
  if (out.failed) out.return_ = failure_return;
  return out;
}

/// Samples eps ~ N(0, params.covariance) and runs theta + eps.
inline Rollout run_episode(Environment& env, const PolicyParams& params, const FeatureMap& features,
                           const ActionAdapter& adapter, const TangentFrame& frame0, Rng& rng,
                           double failure_return) {
  Eigen::MatrixXd eps = sample_perturbation(params, rng);
  Rollout r = run_episode(env, params.theta + eps, features, adapter, frame0, failure_return);
  r.noise = std::move(eps);
  return r;
}

/// Tracks the worst return seen so far; failed rollouts score one below it.
class FailurePenalty {
 public:
  double value() const { return seen_ ? worst_ - 1.0 : -1.0; }
  void observe(const Rollout& r) {
    if (r.failed) return;
    if (!seen_ || r.return_ < worst_) worst_ = r.return_;
    seen_ = true;
  }

 private:
  double worst_ = 0.0;
  bool seen_ = false;
};

}  // namespace geomrl
