#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "geomrl/errors.hpp"
#include "geomrl/manifold/linalg.hpp"
#include "geomrl/manifold/repair_counter.hpp"
#include "geomrl/manifold/spd.hpp"

namespace geomrl {

/// Eigenvalue floor used by the repairing operations (nearest_spd and the
/// Cholesky diagonal).
inline constexpr double kRepairEpsilon = 1e-8;

inline constexpr int triangular_size(int d) { return d * (d + 1) / 2; }

/// Inverse of triangular_size(); throws BadLength for non-triangular lengths.
inline int dim_from_triangular(Eigen::Index len) {
  int d = 1;
  while (triangular_size(d) < len) ++d;
  if (len <= 0 || triangular_size(d) != len) {
    throw BadLength("vector length is not d(d+1)/2 for any d");
  }
  return d;
}

/// Off-diagonal (row, col) pairs, row < col, in the frozen vectorization
/// order: upper triangle in column-major order, reversed. For d = 3 this is
/// (1,2), (0,2), (0,1).
inline std::vector<std::pair<int, int>> off_diagonal_order(int d) {
  std::vector<std::pair<int, int>> order;
  for (int col = 0; col < d; ++col) {
    for (int row = 0; row < col; ++row) order.emplace_back(row, col);
  }
  return {order.rbegin(), order.rend()};
}

/// Mandel vector: diagonal in index order, then sqrt(2) * off-diagonals.
inline Eigen::VectorXd mandel_vec(const Eigen::MatrixXd& s) {
  const int d = static_cast<int>(s.rows());
  Eigen::VectorXd v(triangular_size(d));
  for (int i = 0; i < d; ++i) v[i] = s(i, i);
  int k = d;
  for (auto [r, c] : off_diagonal_order(d)) v[k++] = std::numbers::sqrt2 * 0.5 * (s(r, c) + s(c, r));
  return v;
}

inline Eigen::MatrixXd mandel_unvec(const Eigen::VectorXd& v) {
  const int d = dim_from_triangular(v.size());
  Eigen::MatrixXd s(d, d);
  for (int i = 0; i < d; ++i) s(i, i) = v[i];
  int k = d;
  for (auto [r, c] : off_diagonal_order(d)) {
    s(r, c) = s(c, r) = v[k++] / std::numbers::sqrt2;
  }
  return s;
}

/// Vectorizes the upper-triangular factor U of p = U^T U, using the same
/// slot order as mandel_vec (no scaling).
inline Eigen::VectorXd chol_vec(const SpdMatrix& p) {
  Eigen::LLT<Eigen::MatrixXd> llt(p.matrix());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("chol_vec: factorization failed");
  const Eigen::MatrixXd u = llt.matrixU();
  const int d = p.dim();
  Eigen::VectorXd v(triangular_size(d));
  for (int i = 0; i < d; ++i) v[i] = u(i, i);
  int k = d;
  for (auto [r, c] : off_diagonal_order(d)) v[k++] = u(r, c);
  return v;
}

/// Builds U from v, floors its diagonal at kRepairEpsilon, returns U^T U.
inline SpdMatrix chol_unvec(const Eigen::VectorXd& v) {
  const int d = dim_from_triangular(v.size());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) u(i, i) = std::max(v[i], kRepairEpsilon);
  int k = d;
  for (auto [r, c] : off_diagonal_order(d)) u(r, c) = v[k++];
  return {u.transpose() * u, SpdMatrix::Trusted{}};
}

/// Frobenius-nearest SPD matrix with eigenvalues >= kRepairEpsilon. Input
/// that already satisfies the floor is returned unchanged (after
/// symmetrization).
inline SpdMatrix nearest_spd(const Eigen::MatrixXd& s) {
  ++repair_calls();
  const Eigen::MatrixXd sym = linalg::symmetrize(s);
  const auto e = linalg::sym_eigen(sym);
  if (e.values.minCoeff() >= kRepairEpsilon) return {sym, SpdMatrix::Trusted{}};
  return {linalg::sym_apply(e, [](double l) { return std::max(l, kRepairEpsilon); }),
          SpdMatrix::Trusted{}};
}

}  // namespace geomrl
