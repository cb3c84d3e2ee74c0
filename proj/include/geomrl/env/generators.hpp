#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "geomrl/env/wahba.hpp"
#include "geomrl/errors.hpp"
#include "geomrl/manifold/s3.hpp"
#include "geomrl/manifold/sampling.hpp"
#include "geomrl/manifold/spd.hpp"
#include "geomrl/random.hpp"

namespace geomrl {

/// Smooth orientation trajectory of `count` points starting at the identity.
/// Each point is the previous one composed (body frame) with Exp_I(u_t),
/// where u_t is a sum of random low-frequency sinusoids rescaled so that
/// max_t |u_t| = amplitude. Consecutive geodesic distances are therefore
/// bounded by `amplitude`.
inline std::vector<UnitQuaternion> gen_quat_traj(std::uint64_t seed, int count, double amplitude) {
  if (count < 1) throw Error("gen_quat_traj: count must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> freq(0.25, 1.5), phase(0.0, 2.0 * std::numbers::pi),
      gain(-1.0, 1.0);
  constexpr int kHarmonics = 3;
  Eigen::Matrix<double, 3, kHarmonics> a, f, p;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < kHarmonics; ++j) {
      a(i, j) = gain(rng);
      f(i, j) = freq(rng);
      p(i, j) = phase(rng);
    }
  }
  std::vector<Eigen::Vector3d> u(static_cast<std::size_t>(count - 1));
  double max_norm = 0.0;
  for (int t = 0; t + 1 < count; ++t) {
    const double tau = static_cast<double>(t) / std::max(count - 1, 1);
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < kHarmonics; ++j) {
        v[i] += a(i, j) * std::sin(2.0 * std::numbers::pi * f(i, j) * tau + p(i, j));
      }
    }
    u[static_cast<std::size_t>(t)] = v;
    max_norm = std::max(max_norm, v.norm());
  }
  const double scale = max_norm > 0.0 ? amplitude / max_norm : 0.0;

  std::vector<UnitQuaternion> out;
  out.reserve(static_cast<std::size_t>(count));
  out.push_back(UnitQuaternion::identity());
  const UnitQuaternion id = UnitQuaternion::identity();
  for (const auto& v : u) {
    const Eigen::Vector3d step = scale * v;
    const UnitQuaternion inc = s3_exp(id, Eigen::Vector4d(0.0, step.x(), step.y(), step.z()));
    const Eigen::Quaterniond prev(out.back().w(), out.back().x(), out.back().y(), out.back().z());
    const Eigen::Quaterniond e(inc.w(), inc.x(), inc.y(), inc.z());
    const Eigen::Quaterniond next = prev * e;
    const Eigen::Vector4d c(next.w(), next.x(), next.y(), next.z());
    if (c[0] <= 0.0) {
      throw Error("gen_quat_traj: trajectory leaves the canonical hemisphere; lower amplitude or length");
    }
    out.emplace_back(c / c.norm());
  }
  return out;
}

/// Smooth SPD trajectory of `count` points: piecewise geodesics (with
/// smoothstep timing) through `control_points` random matrices whose
/// eigenvalues lie in [0.5, 2] * spread. Geodesic interpolation is monotone
/// in the Loewner order, so every point keeps that spectral range.
inline std::vector<SpdMatrix> gen_spd_traj(std::uint64_t seed, int count, int dim, double spread,
                                           int control_points = 5) {
  if (count < 1) throw Error("gen_spd_traj: count must be positive");
  if (dim < 1) throw Error("gen_spd_traj: dimension must be positive");
  if (!(spread > 0.0)) throw Error("gen_spd_traj: spread must be positive");
  if (control_points < 1) throw Error("gen_spd_traj: need at least one control point");
  Rng rng(seed);
  std::vector<SpdMatrix> ctrl;
  for (int k = 0; k < control_points; ++k) ctrl.push_back(sampling::random_spd(rng, dim, 0.5 * spread, 2.0 * spread));

  std::vector<SpdMatrix> out;
  out.reserve(static_cast<std::size_t>(count));
  const int segments = control_points - 1;
  for (int i = 0; i < count; ++i) {
    if (segments == 0) {
      out.push_back(ctrl.front());
      continue;
    }
    const double tau = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1) * segments;
    const int k = std::min(static_cast<int>(tau), segments - 1);
    const double s = tau - k;
    const double eased = s * s * (3.0 - 2.0 * s);
    const auto& a = ctrl[static_cast<std::size_t>(k)];
    const auto& b = ctrl[static_cast<std::size_t>(k + 1)];
    out.push_back(spd_exp(a, eased * spd_log(a, b)));
  }
  return out;
}

}  // namespace geomrl
