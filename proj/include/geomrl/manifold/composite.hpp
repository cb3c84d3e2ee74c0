#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/s3.hpp"
#include "geomrl/manifold/spd.hpp"
#include "geomrl/manifold/vectorize.hpp"

namespace geomrl {

enum class ManifoldKind { kS3, kSpd, kEuclid };

/// Kind of one factor of a product manifold. `dim` is 4 for S3, d for
/// SPD(d), n for Euclid(n).
struct FactorKind {
  ManifoldKind kind = ManifoldKind::kEuclid;
  int dim = 0;

  static FactorKind s3() { return {ManifoldKind::kS3, 4}; }
  static FactorKind spd(int d) { return {ManifoldKind::kSpd, d}; }
  static FactorKind euclid(int n) { return {ManifoldKind::kEuclid, n}; }

  // Coordinates used by this factor in a flat tangent vector.
  int tangent_size() const {
    switch (kind) {
      case ManifoldKind::kS3: return 4;
      case ManifoldKind::kSpd: return triangular_size(dim);
      case ManifoldKind::kEuclid: return dim;
    }
    return 0;
  }

  std::string name() const {
    switch (kind) {
      case ManifoldKind::kS3: return "S3";
      case ManifoldKind::kSpd: return "SPD(" + std::to_string(dim) + ")";
      case ManifoldKind::kEuclid: return "Euclid(" + std::to_string(dim) + ")";
    }
    return "?";
  }

  friend bool operator==(const FactorKind&, const FactorKind&) = default;
};

using Layout = std::vector<FactorKind>;

inline int tangent_size(const Layout& layout) {
  int n = 0;
  for (const auto& k : layout) n += k.tangent_size();
  return n;
}

using FactorPoint = std::variant<UnitQuaternion, SpdMatrix, Eigen::VectorXd>;

inline FactorKind kind_of(const FactorPoint& p) {
  if (const auto* q = std::get_if<UnitQuaternion>(&p)) return FactorKind::s3();
  if (const auto* s = std::get_if<SpdMatrix>(&p)) return FactorKind::spd(s->dim());
  return FactorKind::euclid(static_cast<int>(std::get<Eigen::VectorXd>(p).size()));
}

/// Ordered product-manifold point. Factor order is fixed at construction.
class CompositePoint {
 public:
  CompositePoint() = default;
  explicit CompositePoint(std::vector<FactorPoint> factors) : factors_(std::move(factors)) {}
  CompositePoint(std::initializer_list<FactorPoint> factors) : factors_(factors) {}

  std::size_t size() const { return factors_.size(); }
  const FactorPoint& operator[](std::size_t i) const { return factors_[i]; }
  FactorPoint& operator[](std::size_t i) { return factors_[i]; }
  const std::vector<FactorPoint>& factors() const { return factors_; }

  template <class T>
  const T& get(std::size_t i) const { return std::get<T>(factors_[i]); }

  Layout layout() const {
    Layout l;
    l.reserve(factors_.size());
    for (const auto& f : factors_) l.push_back(kind_of(f));
    return l;
  }

 private:
  std::vector<FactorPoint> factors_;
};

/// Flat tangent vector over a product manifold. Segments are concatenated in
/// factor order: S3 -> 4 ambient coordinates, SPD(d) -> d(d+1)/2 Mandel
/// coordinates, Euclid(n) -> n coordinates.
class CompositeTangent {
 public:
  CompositeTangent() = default;
  CompositeTangent(Layout layout, Eigen::VectorXd flat)
      : layout_(std::move(layout)), flat_(std::move(flat)) {
    if (flat_.size() != tangent_size(layout_)) {
      throw BadLength("CompositeTangent: flat length does not match layout");
    }
  }

  static CompositeTangent zero(const Layout& layout) {
    return {layout, Eigen::VectorXd::Zero(tangent_size(layout))};
  }

  const Layout& layout() const { return layout_; }
  const Eigen::VectorXd& flat() const { return flat_; }
  Eigen::VectorXd& flat() { return flat_; }

  Eigen::Index offset(std::size_t i) const {
    Eigen::Index o = 0;
    for (std::size_t k = 0; k < i; ++k) o += layout_[k].tangent_size();
    return o;
  }

  auto segment(std::size_t i) const { return flat_.segment(offset(i), layout_[i].tangent_size()); }
  auto segment(std::size_t i) { return flat_.segment(offset(i), layout_[i].tangent_size()); }

 private:
  Layout layout_;
  Eigen::VectorXd flat_;
};

/// Identity quaternion, identity matrix, zero vector per factor.
inline CompositePoint default_base(const Layout& layout) {
  std::vector<FactorPoint> f;
  for (const auto& k : layout) {
    switch (k.kind) {
      case ManifoldKind::kS3: f.emplace_back(UnitQuaternion::identity()); break;
      case ManifoldKind::kSpd: f.emplace_back(SpdMatrix::identity(k.dim)); break;
      case ManifoldKind::kEuclid: f.emplace_back(Eigen::VectorXd(Eigen::VectorXd::Zero(k.dim))); break;
    }
  }
  return CompositePoint(std::move(f));
}

namespace detail {

inline void require_layout(const Layout& a, const Layout& b, const char* op) {
  if (a != b) throw KindMismatch(std::string(op) + ": factor kinds differ");
}

}  // namespace detail

inline CompositeTangent composite_transport(const CompositePoint& from, const CompositePoint& to,
                                            const CompositeTangent& t) {
  const Layout layout = from.layout();
  detail::require_layout(layout, to.layout(), "composite_transport");
  detail::require_layout(layout, t.layout(), "composite_transport");
  CompositeTangent out = t;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i].kind) {
      case ManifoldKind::kS3:
        out.segment(i) = s3_transport(from.get<UnitQuaternion>(i), to.get<UnitQuaternion>(i),
                                      t.segment(i));
        break;
      case ManifoldKind::kSpd:
        out.segment(i) = mandel_vec(spd_transport(from.get<SpdMatrix>(i), to.get<SpdMatrix>(i),
                                                  mandel_unvec(t.segment(i))));
        break;
      case ManifoldKind::kEuclid: break;
    }
  }
  return out;
}

inline CompositePoint composite_exp(const CompositePoint& base, const CompositeTangent& t) {
  const Layout layout = base.layout();
  detail::require_layout(layout, t.layout(), "composite_exp");
  std::vector<FactorPoint> f;
  f.reserve(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i].kind) {
      case ManifoldKind::kS3:
        f.emplace_back(s3_exp(base.get<UnitQuaternion>(i), t.segment(i)));
        break;
      case ManifoldKind::kSpd:
        f.emplace_back(spd_exp(base.get<SpdMatrix>(i), mandel_unvec(t.segment(i))));
        break;
      case ManifoldKind::kEuclid:
        f.emplace_back(Eigen::VectorXd(base.get<Eigen::VectorXd>(i) + t.segment(i)));
        break;
    }
  }
  return CompositePoint(std::move(f));
}

inline CompositeTangent composite_log(const CompositePoint& base, const CompositePoint& target) {
  const Layout layout = base.layout();
  detail::require_layout(layout, target.layout(), "composite_log");
  CompositeTangent out = CompositeTangent::zero(layout);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i].kind) {
      case ManifoldKind::kS3:
        out.segment(i) = s3_log(base.get<UnitQuaternion>(i), target.get<UnitQuaternion>(i));
        break;
      case ManifoldKind::kSpd:
        out.segment(i) = mandel_vec(spd_log(base.get<SpdMatrix>(i), target.get<SpdMatrix>(i)));
        break;
      case ManifoldKind::kEuclid:
        out.segment(i) = target.get<Eigen::VectorXd>(i) - base.get<Eigen::VectorXd>(i);
        break;
    }
  }
  return out;
}

/// Per-factor geodesic distances (S3 arc, SPD affine-invariant, Euclidean).
inline Eigen::VectorXd composite_distances(const CompositePoint& a, const CompositePoint& b) {
  const Layout layout = a.layout();
  detail::require_layout(layout, b.layout(), "composite_distances");
  Eigen::VectorXd d(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    switch (layout[i].kind) {
      case ManifoldKind::kS3: d[i] = s3_distance(a.get<UnitQuaternion>(i), b.get<UnitQuaternion>(i)); break;
      case ManifoldKind::kSpd: d[i] = spd_distance(a.get<SpdMatrix>(i), b.get<SpdMatrix>(i)); break;
      case ManifoldKind::kEuclid:
        d[i] = (a.get<Eigen::VectorXd>(i) - b.get<Eigen::VectorXd>(i)).norm();
        break;
    }
  }
  return d;
}

/// Flattens a point into plain coordinates: 4 per quaternion, d*d row-major
/// per SPD matrix, n per Euclidean factor. Used for observations and logging.
inline Eigen::VectorXd flatten(const CompositePoint& p) {
  std::vector<double> out;
  for (const auto& f : p.factors()) {
    if (const auto* q = std::get_if<UnitQuaternion>(&f)) {
      out.insert(out.end(), q->coeffs().data(), q->coeffs().data() + 4);
    } else if (const auto* s = std::get_if<SpdMatrix>(&f)) {
      for (int r = 0; r < s->dim(); ++r)
        for (int c = 0; c < s->dim(); ++c) out.push_back(s->matrix()(r, c));
    } else {
      const auto& v = std::get<Eigen::VectorXd>(f);
      out.insert(out.end(), v.data(), v.data() + v.size());
    }
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

}  // namespace geomrl
