#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/composite.hpp"
#include "geomrl/policy/features.hpp"
#include "geomrl/policy/frame.hpp"

namespace geomrl {

/// How a flat policy output becomes a manifold action.
///   kGrl       tangent action at base_P, transported to base_L, Exp at base_L
///   kNormalize S3 only: raw R^4 output divided by its norm
///   kCholesky  SPD only: raw output is the upper Cholesky factor
///   kMandel    SPD only: raw output is a Mandel vector, repaired by nearest_spd
enum class AdapterMode { kGrl, kNormalize, kCholesky, kMandel };

inline std::string to_string(AdapterMode m) {
  switch (m) {
    case AdapterMode::kGrl: return "grl";
    case AdapterMode::kNormalize: return "normalize";
    case AdapterMode::kCholesky: return "cholesky";
    case AdapterMode::kMandel: return "mandel";
  }
  return "?";
}

inline bool supports(AdapterMode mode, const Layout& layout) {
  for (const auto& k : layout) {
    if (mode == AdapterMode::kNormalize && k.kind == ManifoldKind::kSpd) return false;
    if ((mode == AdapterMode::kCholesky || mode == AdapterMode::kMandel) &&
        k.kind == ManifoldKind::kS3) {
      return false;
    }
  }
  return true;
}

/// Baselines that apply to a layout, GRL first.
inline std::vector<AdapterMode> applicable_adapters(const Layout& layout) {
  std::vector<AdapterMode> out;
  for (auto m : {AdapterMode::kGrl, AdapterMode::kNormalize, AdapterMode::kCholesky,
                 AdapterMode::kMandel}) {
    bool has_target = m == AdapterMode::kGrl;
    for (const auto& k : layout) {
      if (m == AdapterMode::kNormalize && k.kind == ManifoldKind::kS3) has_target = true;
      if ((m == AdapterMode::kCholesky || m == AdapterMode::kMandel) && k.kind == ManifoldKind::kSpd)
        has_target = true;
    }
    if (has_target && supports(m, layout)) out.push_back(m);
  }
  return out;
}

struct GrlAction {
  CompositePoint action;
  CompositeTangent local_tangent;
};

/// a_L = Gamma_{P->L}(a_P), action = Exp_L(a_L). S3 segments of a_P are first
/// projected onto T_{base_P} S3.
inline GrlAction grl_map_action(const TangentFrame& frame, const CompositeTangent& a_p) {
  const Layout& layout = a_p.layout();
  CompositeTangent at_p = a_p;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].kind == ManifoldKind::kS3) {
      at_p.segment(i) = s3_project_tangent(frame.base_p().get<UnitQuaternion>(i), at_p.segment(i));
    }
  }
  CompositeTangent a_l = composite_transport(frame.base_p(), frame.base_l(), at_p);
  CompositePoint action = composite_exp(frame.base_l(), a_l);
  return {std::move(action), std::move(a_l)};
}

/// Maps a raw output vector through a baseline parameterization. `repairs`
/// (optional) is incremented once per normalization or nearest_spd call and
/// once per Cholesky diagonal that hits the floor.
inline CompositePoint baseline_map_action(AdapterMode mode, const Layout& layout,
                                          const Eigen::VectorXd& raw, int* repairs = nullptr) {
  if (mode == AdapterMode::kGrl) throw KindMismatch("baseline_map_action: GRL is not a baseline");
  if (!supports(mode, layout)) {
    throw KindMismatch("baseline_map_action: adapter " + to_string(mode) +
                       " does not support this layout");
  }
  if (raw.size() != tangent_size(layout)) throw BadLength("baseline_map_action: raw length");
  int count = 0;
  std::vector<FactorPoint> out;
  Eigen::Index offset = 0;
  for (const auto& k : layout) {
    const Eigen::VectorXd seg = raw.segment(offset, k.tangent_size());
    offset += k.tangent_size();
    switch (k.kind) {
      case ManifoldKind::kS3:
        ++count;
        out.emplace_back(s3_canonicalize(seg));
        break;
      case ManifoldKind::kSpd:
        if (mode == AdapterMode::kMandel) {
          ++count;
          out.emplace_back(nearest_spd(mandel_unvec(seg)));
        } else {
          count += static_cast<int>((seg.head(k.dim).array() < kRepairEpsilon).count());
          out.emplace_back(chol_unvec(seg));
        }
        break;
      case ManifoldKind::kEuclid:
        out.emplace_back(Eigen::VectorXd(seg));
        break;
    }
  }
  if (repairs) *repairs += count;
  return CompositePoint(std::move(out));
}

/// Raw encoding of a point under a baseline parameterization (the inverse of
/// baseline_map_action on valid points).
inline Eigen::VectorXd baseline_encode(AdapterMode mode, const CompositePoint& p) {
  const Layout layout = p.layout();
  Eigen::VectorXd raw(tangent_size(layout));
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const int n = layout[i].tangent_size();
    switch (layout[i].kind) {
      case ManifoldKind::kS3: raw.segment(offset, n) = p.get<UnitQuaternion>(i).coeffs(); break;
      case ManifoldKind::kSpd:
        raw.segment(offset, n) = mode == AdapterMode::kCholesky ? chol_vec(p.get<SpdMatrix>(i))
                                                                : mandel_vec(p.get<SpdMatrix>(i).matrix());
        break;
      case ManifoldKind::kEuclid: raw.segment(offset, n) = p.get<Eigen::VectorXd>(i); break;
    }
    offset += n;
  }
  return raw;
}

/// Starting parameters whose mean action is `start` at every step: zero for
/// GRL (Exp of the zero tangent), the baseline encoding of `start` otherwise.
/// `start` should equal the frame's base_L at t = 0 for GRL to agree.
inline Eigen::MatrixXd initial_theta(AdapterMode mode, const Layout& layout, const FeatureMap& features,
                                     const CompositePoint& start) {
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(tangent_size(layout), features.dim());
  if (mode == AdapterMode::kGrl) return theta;
  const Eigen::VectorXd raw = baseline_encode(mode, start);
  if (features.partition_of_unity()) {
    theta.colwise() = raw;
  } else {
    theta.col(theta.cols() - 1) = raw;  // bias column
  }
  return theta;
}

/// Result of mapping one policy output.
struct AdapterOutput {
  CompositePoint action;
  CompositeTangent local_tangent;  // a_L for GRL, the raw vector for baselines
  int repairs = 0;
};

class ActionAdapter {
 public:
  explicit ActionAdapter(AdapterMode mode) : mode_(mode) {}

  AdapterMode mode() const { return mode_; }

  AdapterOutput map(const TangentFrame& frame, const CompositeTangent& output) const {
    if (mode_ == AdapterMode::kGrl) {
      auto g = grl_map_action(frame, output);
      return {std::move(g.action), std::move(g.local_tangent), 0};
    }
    AdapterOutput out{{}, output, 0};
    out.action = baseline_map_action(mode_, output.layout(), output.flat(), &out.repairs);
    return out;
  }

 private:
  AdapterMode mode_;
};

}  // namespace geomrl
