#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/composite.hpp"

namespace geomrl {

/// Log-density of the Riemannian Gaussian centred at `mean` with covariance
/// `cov` over the flat tangent coordinates at `mean`:
///   -1/2 (k log 2pi + log|cov|) - 1/2 v^T cov^{-1} v,   v = Log_mean(q).
inline double riemannian_gaussian_logpdf(const CompositePoint& mean, const Eigen::MatrixXd& cov,
                                         const CompositePoint& q) {
  const Eigen::VectorXd v = composite_log(mean, q).flat();
  if (cov.rows() != v.size() || cov.cols() != v.size()) {
    throw DimensionMismatch("riemannian_gaussian_logpdf: covariance size mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("riemannian_gaussian_logpdf: covariance not SPD");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const Eigen::VectorXd w = llt.matrixL().solve(v);
  const auto k = static_cast<double>(v.size());
  return -0.5 * (k * std::log(2.0 * std::numbers::pi) + log_det) - 0.5 * w.squaredNorm();
}

}  // namespace geomrl
