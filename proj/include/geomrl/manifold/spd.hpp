#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/linalg.hpp"

namespace geomrl {

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kLogEigenFloor = 1e-12;

/// Symmetric positive-definite matrix. The checked constructor rejects
/// asymmetric input (relative Frobenius tolerance 1e-10) and anything that
/// fails a Cholesky factorization; the stored matrix is exactly symmetric.
class SpdMatrix {
 public:
  struct Trusted {};

  explicit SpdMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw DimensionMismatch("SpdMatrix: matrix must be square and non-empty");
    }
    if (linalg::asymmetry(m) > kSymmetryTolerance * std::max(1.0, m.norm())) {
      throw NotPositiveDefinite("SpdMatrix: matrix is not symmetric");
    }
    m_ = linalg::symmetrize(m);
    Eigen::LLT<Eigen::MatrixXd> llt(m_);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("SpdMatrix: matrix is not positive definite");
    }
  }

  // For results that are SPD by construction (exp maps, congruences of SPD
  // matrices, eigenvalue clamping). Only symmetrizes.
  SpdMatrix(const Eigen::MatrixXd& m, Trusted) : m_(linalg::symmetrize(m)) {}

  static SpdMatrix identity(int d) { return {Eigen::MatrixXd::Identity(d, d), Trusted{}}; }

  const Eigen::MatrixXd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  Eigen::MatrixXd m_;
};

/// Symmetric d x d tangent matrix at some SPD point.
using SpdTangent = Eigen::MatrixXd;

inline SpdMatrix sym_expm(const Eigen::MatrixXd& s) {
  return {linalg::sym_apply(linalg::sym_eigen(s), [](double l) { return std::exp(l); }),
          SpdMatrix::Trusted{}};
}

inline Eigen::MatrixXd sym_logm(const Eigen::MatrixXd& p) {
  const auto e = linalg::sym_eigen(p);
  if (!(e.values.minCoeff() > kLogEigenFloor)) {
    throw NotPositiveDefinite("sym_logm: eigenvalue below 1e-12");
  }
  return linalg::sym_apply(e, [](double l) { return std::log(l); });
}

inline Eigen::MatrixXd sym_logm(const SpdMatrix& p) { return sym_logm(p.matrix()); }

namespace detail {

struct SqrtPair {
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;
};

inline SqrtPair sqrt_pair(const SpdMatrix& p) {
  const auto e = linalg::sym_eigen(p.matrix());
  if (!(e.values.minCoeff() > 0.0)) {
    throw NotPositiveDefinite("SPD square root: non-positive eigenvalue");
  }
  return {linalg::sym_apply(e, [](double l) { return std::sqrt(l); }),
          linalg::sym_apply(e, [](double l) { return 1.0 / std::sqrt(l); })};
}

inline void require_same_dim(const SpdMatrix& a, Eigen::Index rows, Eigen::Index cols) {
  if (a.dim() != rows || a.dim() != cols) {
    throw DimensionMismatch("SPD operator: dimension mismatch");
  }
}

}  // namespace detail

inline SpdMatrix spd_exp(const SpdMatrix& base, const SpdTangent& t) {
  detail::require_same_dim(base, t.rows(), t.cols());
  const auto r = detail::sqrt_pair(base);
  const Eigen::MatrixXd inner = r.inv_sqrt * linalg::symmetrize(t) * r.inv_sqrt;
  return {r.sqrt * sym_expm(inner).matrix() * r.sqrt, SpdMatrix::Trusted{}};
}

inline SpdTangent spd_log(const SpdMatrix& base, const SpdMatrix& target) {
  detail::require_same_dim(base, target.dim(), target.dim());
  const auto r = detail::sqrt_pair(base);
  const Eigen::MatrixXd inner = r.inv_sqrt * target.matrix() * r.inv_sqrt;
  return linalg::symmetrize(r.sqrt * sym_logm(inner) * r.sqrt);
}

/// to^{1/2} from^{-1/2} t from^{-1/2} to^{1/2}; an isometry for the
/// affine-invariant metric and the exact parallel transport when from = I.
inline SpdTangent spd_transport(const SpdMatrix& from, const SpdMatrix& to, const SpdTangent& t) {
  detail::require_same_dim(from, to.dim(), to.dim());
  detail::require_same_dim(from, t.rows(), t.cols());
  const auto f = detail::sqrt_pair(from);
  const auto g = detail::sqrt_pair(to);
  const Eigen::MatrixXd a = g.sqrt * f.inv_sqrt;
  return linalg::symmetrize(a * t * a.transpose());
}

/// Affine-invariant distance |logm(a^{-1/2} b a^{-1/2})|_F, computed from the
/// generalized eigenvalues of (b, a) through a Cholesky factor of a. This
/// loses less accuracy than forming a^{-1/2} when a is badly conditioned.
inline double spd_distance(const SpdMatrix& a, const SpdMatrix& b) {
  detail::require_same_dim(a, b.dim(), b.dim());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> g(b.matrix(), a.matrix(), Eigen::EigenvaluesOnly);
  if (g.info() != Eigen::Success) throw NotPositiveDefinite("spd_distance: generalized eigensolver failed");
  const Eigen::VectorXd l = g.eigenvalues();
  if (!(l.minCoeff() > kLogEigenFloor)) {
    throw NotPositiveDefinite("spd_distance: eigenvalue below 1e-12");
  }
  return l.unaryExpr([](double x) { return std::log(x); }).norm();
}

/// <a, b>_base = tr(base^{-1} a base^{-1} b)
inline double spd_inner(const SpdMatrix& base, const SpdTangent& a, const SpdTangent& b) {
  const Eigen::MatrixXd inv = base.matrix().llt().solve(
      Eigen::MatrixXd::Identity(base.dim(), base.dim()));
  return (inv * a * inv * b).trace();
}

}  // namespace geomrl
