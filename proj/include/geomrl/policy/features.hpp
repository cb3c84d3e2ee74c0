#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/composite.hpp"

namespace geomrl {

enum class FeatureKind { kConstant, kTimeRbf, kStateLinear };

/// Policy basis phi(t, s).
///   constant:     [1]
///   time-rbf:     n Gaussians over normalized episode time, normalized to sum to 1
///   state-linear: [Log_base(s) ; 1], tangent coordinates of the state at `base`
class FeatureMap {
 public:
  static FeatureMap constant() { return FeatureMap(FeatureKind::kConstant); }

  // width <= 0 selects 1 / n_basis.
  static FeatureMap time_rbf(int n_basis, double width = 0.0) {
    if (n_basis < 1) throw DimensionMismatch("time_rbf: n_basis must be >= 1");
    FeatureMap f(FeatureKind::kTimeRbf);
    f.n_basis_ = n_basis;
    f.width_ = width > 0.0 ? width : 1.0 / n_basis;
    return f;
  }

  static FeatureMap state_linear(CompositePoint base) {
    FeatureMap f(FeatureKind::kStateLinear);
    f.n_basis_ = tangent_size(base.layout()) + 1;
    f.base_ = std::move(base);
    return f;
  }

  FeatureKind kind() const { return kind_; }
  double width() const { return width_; }

  int dim() const { return kind_ == FeatureKind::kConstant ? 1 : n_basis_; }

  // Features that sum to one at every t: a constant column offset in theta
  // shifts the policy mean by exactly that offset.
  bool partition_of_unity() const { return kind_ != FeatureKind::kStateLinear; }

  Eigen::VectorXd evaluate(int t, int horizon, const CompositePoint& state) const {
    switch (kind_) {
      case FeatureKind::kConstant: return Eigen::VectorXd::Ones(1);
      case FeatureKind::kTimeRbf: {
        const double tau = horizon > 1 ? static_cast<double>(t) / (horizon - 1) : 0.0;
        Eigen::VectorXd phi(n_basis_);
        for (int b = 0; b < n_basis_; ++b) {
          const double c = n_basis_ > 1 ? static_cast<double>(b) / (n_basis_ - 1) : 0.5;
          phi[b] = std::exp(-0.5 * (tau - c) * (tau - c) / (width_ * width_));
        }
        return phi / phi.sum();
      }
      case FeatureKind::kStateLinear: {
        Eigen::VectorXd phi(n_basis_);
        phi.head(n_basis_ - 1) = composite_log(base_, state).flat();
        phi[n_basis_ - 1] = 1.0;
        return phi;
      }
    }
    return {};
  }

 private:
  explicit FeatureMap(FeatureKind kind) : kind_(kind) {}

  FeatureKind kind_;
  int n_basis_ = 1;
  double width_ = 0.0;
  CompositePoint base_;
};

}  // namespace geomrl
