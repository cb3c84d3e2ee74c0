#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "geomrl/policy/policy.hpp"

namespace geomrl {

struct PowerConfig {
  int elite_count = 10;
  double exploration_std = 0.3;
  double decay = 0.999;  // multiplies the std after every rollout
};

/// One remembered rollout: the parameters it actually ran with and its return.
struct PowerElite {
  Eigen::MatrixXd params;
  double return_ = 0.0;
};

/// Reward-weighted policy search with an importance-sampling buffer of the
/// best k rollouts. Elites store absolute parameters, so their perturbation
/// relative to the current theta is theta_k - theta at update time.
class PowerState {
 public:
  PowerState(Eigen::MatrixXd theta, PowerConfig cfg)
      : params_(PolicyParams::with_diagonal(std::move(theta), cfg.exploration_std)),
        cfg_(cfg),
        std_(cfg.exploration_std) {
    if (cfg_.elite_count < 1) throw Error("PoWER: elite_count must be at least 1");
  }

  const PolicyParams& params() const { return params_; }
  const std::vector<PowerElite>& elites() const { return elites_; }
  double exploration_std() const { return std_; }
  const PowerConfig& config() const { return cfg_; }

  /// Inserts (theta + eps, return) and re-estimates theta as
  /// theta + sum_k w_k (theta_k - theta) / sum_k w_k with
  /// w_k = R_k - min_j R_j + 1e-10.
  void update(const Eigen::MatrixXd& eps, double ret) {
    PowerElite e{params_.theta + eps, ret};
    auto pos = std::find_if(elites_.begin(), elites_.end(),
                            [&](const PowerElite& x) { return x.return_ < ret; });
    elites_.insert(pos, std::move(e));
    if (static_cast<int>(elites_.size()) > cfg_.elite_count) elites_.pop_back();

    const double lo = elites_.back().return_;
    Eigen::MatrixXd num = Eigen::MatrixXd::Zero(params_.theta.rows(), params_.theta.cols());
    double den = 0.0;
    for (const auto& x : elites_) {
      const double w = x.return_ - lo + 1e-10;
      num += w * (x.params - params_.theta);
      den += w;
    }
    params_.theta += num / den;

    std_ *= cfg_.decay;
    params_.covariance *= cfg_.decay * cfg_.decay;
  }

 private:
  PolicyParams params_;
  PowerConfig cfg_;
  double std_;
  std::vector<PowerElite> elites_;
};

}  // namespace geomrl
