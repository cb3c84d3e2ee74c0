#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/linalg.hpp"
#include "geomrl/random.hpp"

namespace geomrl {

struct CmaesConfig {
  double sigma0 = 0.3;
  int population = 0;  // 0 selects 4 + floor(3 ln n)
};

inline int cmaes_default_population(Eigen::Index n) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

/// (mu/mu_w, lambda) CMA-ES with cumulative step-size adaptation, rank-one and
/// rank-mu covariance updates; constants follow Hansen's tutorial defaults.
/// Higher return is better.
class CmaesState {
 public:
  CmaesState(Eigen::VectorXd mean, CmaesConfig cfg) : mean_(std::move(mean)), sigma_(cfg.sigma0) {
    n_ = mean_.size();
    if (n_ < 1) throw Error("CMA-ES: empty parameter vector");
    if (!(sigma_ > 0.0)) throw Error("CMA-ES: sigma0 must be positive");
    lambda_ = cfg.population > 0 ? cfg.population : cmaes_default_population(n_);
    if (lambda_ < 2) throw Error("CMA-ES: population must be at least 2");
    mu_ = lambda_ / 2;

    weights_.resize(mu_);
    for (int i = 0; i < mu_; ++i) weights_[i] = std::log((lambda_ + 1) / 2.0) - std::log(i + 1.0);
    weights_ /= weights_.sum();
    mu_eff_ = 1.0 / weights_.squaredNorm();

    const double n = static_cast<double>(n_);
    c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
    d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + c_sigma_;
    c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
    c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
    c_mu_ = std::min(1.0 - c1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) / ((n + 2.0) * (n + 2.0) + mu_eff_));
    chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    c_ = Eigen::MatrixXd::Identity(n_, n_);
    b_ = Eigen::MatrixXd::Identity(n_, n_);
    d_ = Eigen::VectorXd::Ones(n_);
    p_sigma_ = Eigen::VectorXd::Zero(n_);
    p_c_ = Eigen::VectorXd::Zero(n_);
  }

  /// lambda samples from N(mean, sigma^2 C).
  std::vector<Eigen::VectorXd> ask(Rng& rng) const {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(lambda_));
    Eigen::VectorXd z(n_);
    for (int k = 0; k < lambda_; ++k) {
      for (Eigen::Index i = 0; i < n_; ++i) z[i] = g(rng);
      out.push_back(mean_ + sigma_ * (b_ * d_.cwiseProduct(z)));
    }
    return out;
  }

  void tell(const std::vector<std::pair<Eigen::VectorXd, double>>& evaluated) {
    if (static_cast<int>(evaluated.size()) != lambda_) {
      throw BadLength("CMA-ES: tell needs exactly lambda evaluations");
    }
    for (const auto& [x, r] : evaluated) {
      if (!std::isfinite(r)) throw NonFiniteReturn("CMA-ES: non-finite return");
      if (x.size() != n_) throw DimensionMismatch("CMA-ES: candidate dimension");
    }
    std::vector<int> order(static_cast<std::size_t>(lambda_));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return evaluated[a].second > evaluated[b].second; });

    const Eigen::VectorXd old_mean = mean_;
    Eigen::MatrixXd y(n_, mu_);
    mean_.setZero();
    for (int i = 0; i < mu_; ++i) {
      const Eigen::VectorXd& x = evaluated[static_cast<std::size_t>(order[i])].first;
      mean_ += weights_[i] * x;
      y.col(i) = (x - old_mean) / sigma_;
    }
    const Eigen::VectorXd y_w = (mean_ - old_mean) / sigma_;

    // C^{-1/2} y_w = B D^{-1} B^T y_w
    const Eigen::VectorXd c_inv_sqrt_y = b_ * (b_.transpose() * y_w).cwiseQuotient(d_);
    p_sigma_ = (1.0 - c_sigma_) * p_sigma_ + std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * c_inv_sqrt_y;
    ++generation_;
    const double ps_norm = p_sigma_.norm();
    const double denom = std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * generation_));
    const bool h_sigma = ps_norm / denom < (1.4 + 2.0 / (static_cast<double>(n_) + 1.0)) * chi_n_;
    p_c_ = (1.0 - c_c_) * p_c_ + (h_sigma ? std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) : 0.0) * y_w;

    const double delta = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
    Eigen::MatrixXd rank_mu = y * weights_.asDiagonal() * y.transpose();
    c_ = (1.0 - c1_ - c_mu_ + c1_ * delta) * c_ + c1_ * p_c_ * p_c_.transpose() + c_mu_ * rank_mu;
    c_ = linalg::symmetrize(c_);

    sigma_ *= std::exp((c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c_);
    b_ = eig.eigenvectors();
    // Guard against round-off pushing tiny eigenvalues to zero or below.
    d_ = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
  }

  const Eigen::VectorXd& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return c_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  int lambda() const { return lambda_; }
  int mu() const { return mu_; }
  int generation() const { return generation_; }
  Eigen::Index dim() const { return n_; }

 private:
  Eigen::Index n_ = 0;
  Eigen::VectorXd mean_;
  double sigma_;
  int lambda_ = 0, mu_ = 0, generation_ = 0;
  Eigen::VectorXd weights_;
  double mu_eff_ = 0, c_sigma_ = 0, d_sigma_ = 0, c_c_ = 0, c1_ = 0, c_mu_ = 0, chi_n_ = 0;
  Eigen::MatrixXd c_, b_;
  Eigen::VectorXd d_, p_sigma_, p_c_;
};

}  // namespace geomrl
