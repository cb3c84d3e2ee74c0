#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/repair_counter.hpp"

namespace geomrl {

/// Point on S3 stored as (w, x, y, z). Construction checks the unit norm
/// (within kNormTolerance); it never normalizes. Use s3_canonicalize() to
/// turn an arbitrary nonzero 4-vector into a unit quaternion.
class UnitQuaternion {
 public:
  static constexpr double kNormTolerance = 1e-12;

  UnitQuaternion() : q_(1.0, 0.0, 0.0, 0.0) {}
  UnitQuaternion(double w, double x, double y, double z)
      : UnitQuaternion(Eigen::Vector4d(w, x, y, z)) {}
  explicit UnitQuaternion(const Eigen::Vector4d& q) : q_(q) {
    if (!(std::abs(q_.norm() - 1.0) <= kNormTolerance)) {
      throw Error("UnitQuaternion: coefficients are not unit norm");
    }
  }

  static UnitQuaternion identity() { return {}; }

  const Eigen::Vector4d& coeffs() const { return q_; }
  double w() const { return q_[0]; }
  double x() const { return q_[1]; }
  double y() const { return q_[2]; }
  double z() const { return q_[3]; }

  UnitQuaternion operator-() const { return UnitQuaternion(Eigen::Vector4d(-q_)); }

  // w > 0, or w == 0 and the first nonzero of (x, y, z) positive.
  bool is_canonical() const {
    for (int i = 0; i < 4; ++i) {
      if (q_[i] != 0.0) return q_[i] > 0.0;
    }
    return false;
  }

  Eigen::Matrix3d rotation_matrix() const {
    return Eigen::Quaterniond(q_[0], q_[1], q_[2], q_[3]).toRotationMatrix();
  }

  Eigen::Vector3d rotate(const Eigen::Vector3d& v) const { return rotation_matrix() * v; }

 private:
  Eigen::Vector4d q_;
};

/// Ambient R^4 tangent vector; valid tangents at Q satisfy <Q, v> = 0.
using TangentS3 = Eigen::Vector4d;

inline constexpr double kAntipodalMargin = 1e-6;
inline constexpr double kSamePointDistance = 1e-12;

/// Sign flip onto the canonical hemisphere. Only the sign changes.
inline UnitQuaternion hemisphere_flip(const UnitQuaternion& q) {
  return q.is_canonical() ? q : -q;
}

inline UnitQuaternion s3_canonicalize(const Eigen::Vector4d& q) {
  ++repair_calls();
  const double n = q.norm();
  if (!(n > 1e-12)) throw ZeroNormError("s3_canonicalize: quaternion norm below 1e-12");
  Eigen::Vector4d unit = q / n;
  // A second pass absorbs the last-ulp error of the division.
  unit /= unit.norm();
  return hemisphere_flip(UnitQuaternion(unit));
}

/// Removes the component of v along base.
inline TangentS3 s3_project_tangent(const UnitQuaternion& base, const Eigen::Vector4d& v) {
  return v - base.coeffs().dot(v) * base.coeffs();
}

/// Geodesic distance arccos(<q1, q2>), evaluated as 2 atan2(|q1 - q2|, |q1 + q2|)
/// which is exactly symmetric and keeps precision near 0 and pi.
inline double s3_distance(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  const Eigen::Vector4d& a = q1.coeffs();
  const Eigen::Vector4d& b = q2.coeffs();
  return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

inline TangentS3 s3_log(const UnitQuaternion& base, const UnitQuaternion& target) {
  const double d = s3_distance(base, target);
  if (d < kSamePointDistance) return TangentS3::Zero();
  if (d > std::numbers::pi - kAntipodalMargin) {
    throw AntipodalError("s3_log: target is antipodal to base");
  }
  const Eigen::Vector4d& b = base.coeffs();
  const Eigen::Vector4d& t = target.coeffs();
  const Eigen::Vector4d v = t - b.dot(t) * b;
  return v * (d / v.norm());
}

/// Exponential map. The tangent is projected onto T_base S3 and its norm
/// clamped to pi - 1e-6 so the result stays inside the injectivity radius.
inline UnitQuaternion s3_exp(const UnitQuaternion& base, const TangentS3& tangent) {
  const TangentS3 t = s3_project_tangent(base, tangent);
  const double n = t.norm();
  if (n == 0.0) return base;
  const double angle = std::min(n, std::numbers::pi - kAntipodalMargin);
  Eigen::Vector4d q = std::cos(angle) * base.coeffs() + (std::sin(angle) / n) * t;
  return UnitQuaternion(q);
}

/// Parallel transport along the geodesic from `from` to `to`.
inline TangentS3 s3_transport(const UnitQuaternion& from, const UnitQuaternion& to,
                              const TangentS3& t) {
  const TangentS3 u = s3_log(from, to);
  const double n = u.norm();
  if (n == 0.0) return t;
  const Eigen::Vector4d dir = u / n;
  const double along = dir.dot(t);
  return t + (std::cos(n) - 1.0) * along * dir - std::sin(n) * along * from.coeffs();
}

}  // namespace geomrl
