#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "geomrl/manifold/s3.hpp"
#include "geomrl/manifold/spd.hpp"
#include "geomrl/random.hpp"

namespace geomrl::sampling {

inline Eigen::VectorXd gaussian_vector(Rng& rng, Eigen::Index n, double std = 1.0) {
  std::normal_distribution<double> g(0.0, std);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

/// Uniform (Haar) rotation on the canonical hemisphere.
inline UnitQuaternion random_quaternion(Rng& rng) { return s3_canonicalize(Eigen::Vector4d(gaussian_vector(rng, 4))); }

/// Tangent at `base` with uniform direction and norm uniform in [0, max_norm).
inline TangentS3 random_s3_tangent(Rng& rng, const UnitQuaternion& base, double max_norm) {
  TangentS3 v = s3_project_tangent(base, Eigen::Vector4d(gaussian_vector(rng, 4)));
  std::uniform_real_distribution<double> u(0.0, max_norm);
  return v.normalized() * u(rng);
}

inline Eigen::MatrixXd random_orthogonal(Rng& rng, int d) {
  Eigen::MatrixXd a(d, d);
  for (int c = 0; c < d; ++c) a.col(c) = gaussian_vector(rng, d);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

/// Symmetric matrix with eigenvalues uniform in [lo, hi].
inline Eigen::MatrixXd random_symmetric(Rng& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd l(d);
  for (int i = 0; i < d; ++i) l[i] = u(rng);
  const Eigen::MatrixXd q = random_orthogonal(rng, d);
  const Eigen::MatrixXd s = q * l.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

/// SPD matrix with log-eigenvalues uniform in [log lo, log hi].
inline SpdMatrix random_spd(Rng& rng, int d, double lo = 0.1, double hi = 10.0) {
  const Eigen::MatrixXd s = random_symmetric(rng, d, std::log(lo), std::log(hi));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(s);
  const Eigen::VectorXd l = e.eigenvalues().array().exp();
  return SpdMatrix(e.eigenvectors() * l.asDiagonal() * e.eigenvectors().transpose());
}

}  // namespace geomrl::sampling
