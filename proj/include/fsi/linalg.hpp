#pragma once

#include "fsi/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace fsi {

/// Fixes the phase of every column so that its largest-modulus entry is real
/// and positive. Near-ties (within a relative 1e-9) go to the lowest row.
template <typename Scalar>
void normalize_column_phases(Matrix<Scalar>& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a > best_abs * (1.0 + 1e-9)) {
        best = i;
        best_abs = a;
      }
    }
    if (best_abs <= 0.0) continue;
    const Scalar phase = m(best, j) / static_cast<RealOf<Scalar>>(std::abs(m(best, j)));
    m.col(j) *= Eigen::numext::conj(phase);
  }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues non-increasing.
template <typename Scalar>
struct HermitianEigen {
  Eigen::VectorXd values;
  Matrix<Scalar> vectors;
};

template <typename Scalar>
HermitianEigen<Scalar> hermitian_eigen(const Matrix<Scalar>& a) {
  HermitianEigen<Scalar> out;
  if (a.rows() == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a);
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  normalize_column_phases(out.vectors);
  return out;
}

template <typename Scalar>
Eigen::VectorXd hermitian_eigenvalues(const Matrix<Scalar>& a) {
  if (a.rows() == 0) return Eigen::VectorXd(0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

/// Number of singular values above `relative_tol` times the largest one.
inline Index numerical_rank(const Eigen::VectorXd& singular_values, double relative_tol) {
  if (singular_values.size() == 0 || !(singular_values(0) > 0.0)) return 0;
  const double cut = relative_tol * singular_values(0);
  Index r = 0;
  while (r < singular_values.size() && singular_values(r) > cut) ++r;
  return r;
}

template <typename Scalar>
Eigen::VectorXd singular_values(const Matrix<Scalar>& a) {
  if (a.size() == 0) return Eigen::VectorXd(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a);
  return svd.singularValues();
}

inline double spectral_norm(const auto& a) {
  using Scalar = typename std::decay_t<decltype(a)>::Scalar;
  if (a.size() == 0) return 0.0;
  Matrix<Scalar> m = a;
  return singular_values<Scalar>(m)(0);
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// isometry `basis` inside Scalar^ambient.
template <typename Scalar>
Matrix<Scalar> orthogonal_complement(const Matrix<Scalar>& basis, Index ambient) {
  const Index d = basis.cols();
  if (d == 0) return Matrix<Scalar>::Identity(ambient, ambient);
  Eigen::HouseholderQR<Matrix<Scalar>> qr(basis);
  Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(ambient, ambient);
  Matrix<Scalar> complement = q.rightCols(ambient - d);
  normalize_column_phases(complement);
  return complement;
}

/// Orthonormal basis of {x : a·x = 0} built by Gram-Schmidt over the
/// standard basis vectors in index order, so the lowest-index directions are
/// taken first. `row_space` is an isometry spanning the row space of a.
template <typename Scalar>
Matrix<Scalar> lowest_index_kernel(const Matrix<Scalar>& row_space, Index n) {
  const Index rank = row_space.cols();
  const Index want = n - rank;
  Matrix<Scalar> kernel(n, want);
  if (want == 0) return kernel;
  const double threshold = 0.5 / std::sqrt(static_cast<double>(n));
  Index found = 0;
  for (Index i = 0; i < n && found < want; ++i) {
    Vector<Scalar> u = Vector<Scalar>::Unit(n, i);
    for (int pass = 0; pass < 2; ++pass) {
      if (rank > 0) u -= row_space * (row_space.adjoint() * u);
      if (found > 0) u -= kernel.leftCols(found) * (kernel.leftCols(found).adjoint() * u);
    }
    const double norm = u.norm();
    if (norm > threshold) kernel.col(found++) = u / static_cast<RealOf<Scalar>>(norm);
  }
  return kernel.leftCols(found);
}

/// Symmetrized copy (A + A*)/2; removes roundoff asymmetry.
template <typename Scalar>
Matrix<Scalar> hermitian_part(const Matrix<Scalar>& a) {
  return (a + a.adjoint()) / RealOf<Scalar>(2);
}

}  // namespace fsi
