#pragma once

#include <Eigen/Dense>
#include <random>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/composite.hpp"
#include "geomrl/random.hpp"

namespace geomrl {

/// Linear-Gaussian policy parameters. theta maps features to the flat
/// tangent layout; `covariance` is the exploration covariance over
/// vec(theta) (column-major).
struct PolicyParams {
  Eigen::MatrixXd theta;
  Eigen::MatrixXd covariance;

  static PolicyParams with_diagonal(Eigen::MatrixXd theta, double std) {
    const Eigen::Index n = theta.size();
    return {std::move(theta), Eigen::MatrixXd::Identity(n, n) * (std * std)};
  }

  Eigen::Index size() const { return theta.size(); }

  Eigen::VectorXd flat() const { return theta.reshaped(); }
  void set_flat(const Eigen::VectorXd& v) { theta = v.reshaped(theta.rows(), theta.cols()); }
};

inline CompositeTangent policy_mean_with(const Eigen::MatrixXd& theta, const Layout& layout,
                                         const Eigen::VectorXd& features) {
  if (theta.cols() != features.size()) {
    throw DimensionMismatch("policy: feature dimension does not match theta");
  }
  if (theta.rows() != tangent_size(layout)) {
    throw DimensionMismatch("policy: theta rows do not match the tangent layout");
  }
  return {layout, theta * features};
}

inline CompositeTangent policy_mean(const PolicyParams& p, const Layout& layout,
                                    const Eigen::VectorXd& features) {
  return policy_mean_with(p.theta, layout, features);
}

/// Parameter-space exploration noise eps ~ N(0, covariance), shaped like theta.
inline Eigen::MatrixXd sample_perturbation(const PolicyParams& p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(p.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  Eigen::VectorXd eps;
  if (p.covariance.isDiagonal()) {
    eps = p.covariance.diagonal().cwiseSqrt().cwiseProduct(z);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(p.covariance);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("policy: exploration covariance not SPD");
    }
    eps = llt.matrixL() * z;
  }
  return eps.reshaped(p.theta.rows(), p.theta.cols());
}

/// (theta + eps) phi with a fresh perturbation eps.
inline CompositeTangent policy_sample(const PolicyParams& p, const Layout& layout,
                                      const Eigen::VectorXd& features, Rng& rng) {
  return policy_mean_with(p.theta + sample_perturbation(p, rng), layout, features);
}

}  // namespace geomrl
