#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geomrl/env/environment.hpp"
#include "geomrl/optim/cmaes.hpp"
#include "geomrl/optim/power.hpp"
#include "geomrl/optim/rollout.hpp"
#include "geomrl/policy/adapter.hpp"
#include "geomrl/policy/features.hpp"
#include "geomrl/random.hpp"

namespace geomrl {

enum class AlgorithmKind { kPower, kCmaes };

inline std::string to_string(AlgorithmKind a) { return a == AlgorithmKind::kPower ? "power" : "cmaes"; }

struct TrainSpec {
  AlgorithmKind algorithm = AlgorithmKind::kPower;
  PowerConfig power;
  CmaesConfig cmaes;
  AdapterMode adapter = AdapterMode::kGrl;
  FeatureMap features = FeatureMap::constant();
  int budget = 0;
  int eval_interval = 10;
  std::optional<CompositePoint> base_p;  // unset: the environment's reset state
};

struct CurveRecord {
  std::uint64_t seed = 0;
  int rollout_index = 0;
  double return_ = 0.0;
  std::optional<double> evaluation_return;
};

/// Everything one seed produces. Repair statistics cover every rollout run
/// (training and evaluation).
struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<CurveRecord> records;
  Eigen::MatrixXd final_theta;
  Rollout final_evaluation;
  long long repairs = 0;
  std::uint64_t repair_calls = 0;
  long long factor_actions = 0;
  int failures = 0;

  double final_evaluation_return() const { return final_evaluation.return_; }
  double final_tracking_error() const { return final_evaluation.mean_distance(); }
};

namespace detail {

class SeedRunner {
 public:
  SeedRunner(const Environment& prototype, const TrainSpec& spec, std::uint64_t seed_label, std::uint64_t run_seed)
      : env_(prototype.clone()), spec_(spec), adapter_(spec.adapter), run_seed_(run_seed) {
    if (spec.budget < 0) throw Error("train: budget must be non-negative");
    if (spec.eval_interval < 1) throw Error("train: eval_interval must be positive");
    frame0_ = std::make_unique<TangentFrame>(initial_frame(*env_, spec.base_p ? &*spec.base_p : nullptr));
    theta0_ = initial_theta(spec.adapter, env_->action_layout(), spec.features, env_->state());
    out_.seed = seed_label;
  }

  SeedRun run() {
    evaluate(theta0_, 0, 0.0, /*initial=*/true);
    if (spec_.algorithm == AlgorithmKind::kPower) {
      run_power();
    } else {
      run_cmaes();
    }
    return std::move(out_);
  }

 private:
  Rollout rollout(const Eigen::MatrixXd& theta) {
    Rollout r = run_episode(*env_, theta, spec_.features, adapter_, *frame0_, penalty_.value());
    account(r);
    return r;
  }

  void account(const Rollout& r) {
    penalty_.observe(r);
    out_.repairs += r.repairs;
    out_.repair_calls += r.repair_calls;
    out_.factor_actions += r.factor_actions;
    out_.failures += r.failed ? 1 : 0;
  }

  void evaluate(const Eigen::MatrixXd& theta, int index, double train_return, bool initial) {
    Rollout e = rollout(theta);
    out_.records.push_back({out_.seed, index, initial ? e.return_ : train_return, e.return_});
    out_.final_theta = theta;
    out_.final_evaluation = std::move(e);
  }

  bool eval_due(int i) const { return i % spec_.eval_interval == 0 || i == spec_.budget; }

  void run_power() {
    PowerState state(theta0_, spec_.power);
    const std::uint64_t stream = derive_seed(run_seed_, kRolloutStream);
    for (int i = 1; i <= spec_.budget; ++i) {
      Rng rng(derive_seed(stream, static_cast<std::uint64_t>(i)));
      Rollout r = run_episode(*env_, state.params(), spec_.features, adapter_, *frame0_, rng, penalty_.value());
      account(r);
      state.update(r.noise, r.return_);
      if (eval_due(i)) {
        evaluate(state.params().theta, i, r.return_, false);
      } else {
        out_.records.push_back({out_.seed, i, r.return_, std::nullopt});
      }
    }
  }

  void run_cmaes() {
    const Eigen::Index rows = theta0_.rows(), cols = theta0_.cols();
    CmaesState state(theta0_.reshaped(), spec_.cmaes);
    const std::uint64_t stream = derive_seed(run_seed_, kCmaesStream);
    auto as_theta = [&](const Eigen::VectorXd& v) -> Eigen::MatrixXd { return v.reshaped(rows, cols); };
    int i = 0;
    for (std::uint64_t g = 0; i < spec_.budget; ++g) {
      Rng rng(derive_seed(stream, g));
      const auto candidates = state.ask(rng);
      std::vector<std::pair<Eigen::VectorXd, double>> evaluated;
      evaluated.reserve(candidates.size());
      for (const auto& x : candidates) {
        if (i == spec_.budget) break;
        ++i;
        const Rollout r = rollout(as_theta(x));
        evaluated.emplace_back(x, r.return_);
        if (evaluated.size() == candidates.size()) state.tell(evaluated);
        if (eval_due(i)) {
          evaluate(as_theta(state.mean()), i, r.return_, false);
        } else {
          out_.records.push_back({out_.seed, i, r.return_, std::nullopt});
        }
      }
    }
  }

  std::unique_ptr<Environment> env_;
  const TrainSpec& spec_;
  ActionAdapter adapter_;
  std::uint64_t run_seed_;
  std::unique_ptr<TangentFrame> frame0_;
  Eigen::MatrixXd theta0_;
  FailurePenalty penalty_;
  SeedRun out_;
};

}  // namespace detail

/// Trains one seed. Rollout i (1-based) draws its noise from
/// derive_seed(derive_seed(run_seed, kRolloutStream), i); CMA-ES generation g
/// samples from derive_seed(derive_seed(run_seed, kCmaesStream), g). Records:
/// an initial evaluation at index 0, then one row per rollout, with a
/// noise-free evaluation every eval_interval rollouts and after the last one.
inline SeedRun train_seed(const Environment& prototype, const TrainSpec& spec, std::uint64_t seed_label,
                          std::uint64_t run_seed) {
  return detail::SeedRunner(prototype, spec, seed_label, run_seed).run();
}

}  // namespace geomrl
