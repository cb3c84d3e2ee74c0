#pragma once

#include <Eigen/Dense>

namespace geomrl::linalg {

// Symmetric eigendecomposition m = V diag(values) V^T. Eigen's self-adjoint
// solver (tridiagonal QL) is deterministic for a fixed input.
struct SymEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

inline SymEigen sym_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetrize(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// V diag(f(lambda)) V^T
template <class F>
Eigen::MatrixXd sym_apply(const SymEigen& e, F&& f) {
  Eigen::VectorXd mapped = e.values.unaryExpr(f);
  return symmetrize(e.vectors * mapped.asDiagonal() * e.vectors.transpose());
}

inline double asymmetry(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).norm();
}

}  // namespace geomrl::linalg
