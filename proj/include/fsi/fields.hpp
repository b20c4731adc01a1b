#pragma once

#include "fsi/core.hpp"
#include "fsi/errors.hpp"
#include "fsi/grid.hpp"
#include "fsi/linalg.hpp"

#include <string>
#include <vector>

namespace fsi {

/// Per-fiber L×n matrices whose columns are the fiber vectors of a finite
/// family of generators.
template <typename Scalar>
struct SystemField {
  TorusGrid grid;
  Index ambient_dim = 0;
  Index generator_count = 0;
  std::vector<Matrix<Scalar>> fibers;

  Index size() const { return static_cast<Index>(fibers.size()); }
  const Matrix<Scalar>& operator[](Index i) const { return fibers[static_cast<std::size_t>(i)]; }
  Matrix<Scalar>& operator[](Index i) { return fibers[static_cast<std::size_t>(i)]; }
};

/// Per-fiber Hermitian matrices of a common size.
template <typename Scalar>
struct HermitianField {
  TorusGrid grid;
  Index dim = 0;
  std::vector<Matrix<Scalar>> fibers;

  Index size() const { return static_cast<Index>(fibers.size()); }
  const Matrix<Scalar>& operator[](Index i) const { return fibers[static_cast<std::size_t>(i)]; }
  Matrix<Scalar>& operator[](Index i) { return fibers[static_cast<std::size_t>(i)]; }
};

/// Range function of a finitely generated shift-invariant subspace: per fiber
/// an L×d(x) matrix with orthonormal columns.
template <typename Scalar>
struct SubspaceField {
  TorusGrid grid;
  Index ambient_dim = 0;
  std::vector<Matrix<Scalar>> bases;

  Index size() const { return static_cast<Index>(bases.size()); }
  Index dim(Index i) const { return bases[static_cast<std::size_t>(i)].cols(); }
  const Matrix<Scalar>& operator[](Index i) const { return bases[static_cast<std::size_t>(i)]; }

  std::vector<Index> dims() const {
    std::vector<Index> d(bases.size());
    for (std::size_t i = 0; i < bases.size(); ++i) d[i] = bases[i].cols();
    return d;
  }

  Matrix<Scalar> projector(Index i) const {
    const auto& b = (*this)[i];
    if (b.cols() == 0) return Matrix<Scalar>::Zero(ambient_dim, ambient_dim);
    return b * b.adjoint();
  }
};

/// Fine spectral structure: per fiber non-increasing eigenvalues padded with
/// zeros to `length`, and an isometry holding the eigenvectors of the
/// nonzero slots.
template <typename Scalar>
struct EigenField {
  TorusGrid grid;
  Index length = 0;
  RealLists values;
  std::vector<Matrix<Scalar>> vectors;

  Index size() const { return static_cast<Index>(values.size()); }
};

/// Candidate per-fiber spectra μ(x), non-increasing and padded to a common
/// length.
struct SpectrumField {
  TorusGrid grid;
  Index length = 0;
  RealLists values;

  Index size() const { return static_cast<Index>(values.size()); }
};

template <typename Scalar>
SystemField<Scalar> operator+(const SystemField<Scalar>& a, const SystemField<Scalar>& b) {
  SystemField<Scalar> out = a;
  for (Index i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

template <typename Scalar>
SystemField<Scalar> operator-(const SystemField<Scalar>& a, const SystemField<Scalar>& b) {
  SystemField<Scalar> out = a;
  for (Index i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

template <typename Scalar>
SystemField<Scalar> operator*(RealOf<Scalar> s, const SystemField<Scalar>& a) {
  SystemField<Scalar> out = a;
  for (auto& f : out.fibers) f *= s;
  return out;
}

template <typename Scalar>
HermitianField<Scalar> operator+(const HermitianField<Scalar>& a, const HermitianField<Scalar>& b) {
  HermitianField<Scalar> out = a;
  for (Index i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

template <typename Scalar>
HermitianField<Scalar> operator-(const HermitianField<Scalar>& a, const HermitianField<Scalar>& b) {
  HermitianField<Scalar> out = a;
  for (Index i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

/// Frame operator field S(x) = T T*.
template <typename Scalar>
HermitianField<Scalar> frame_operator(const SystemField<Scalar>& f) {
  HermitianField<Scalar> s{f.grid, f.ambient_dim, {}};
  s.fibers.reserve(f.fibers.size());
  for (const auto& t : f.fibers) s.fibers.push_back(t * t.adjoint());
  return s;
}

/// Gramian field G(x) = T* T.
template <typename Scalar>
HermitianField<Scalar> gramian(const SystemField<Scalar>& f) {
  HermitianField<Scalar> g{f.grid, f.generator_count, {}};
  g.fibers.reserve(f.fibers.size());
  for (const auto& t : f.fibers) g.fibers.push_back(t.adjoint() * t);
  return g;
}

/// Σᵢ ‖fᵢ‖², i.e. the grid integral of ‖T(x)‖_F².
template <typename Scalar>
double norm_squared(const SystemField<Scalar>& f) {
  double total = 0.0;
  for (const auto& t : f.fibers) total += t.squaredNorm();
  return total * f.grid.weight();
}

/// Per-generator squared norms ‖fᵢ‖².
template <typename Scalar>
Eigen::VectorXd generator_norms_squared(const SystemField<Scalar>& f) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.generator_count);
  for (const auto& t : f.fibers) out += t.colwise().squaredNorm().transpose();
  return out * f.grid.weight();
}

template <typename Scalar>
void validate(const SystemField<Scalar>& f) {
  if (f.size() != f.grid.size()) {
    throw ValidationError("shape_mismatch", "system field has " + std::to_string(f.size()) +
                                                " fibers, grid has " + std::to_string(f.grid.size()));
  }
  for (Index i = 0; i < f.size(); ++i) {
    if (f[i].rows() != f.ambient_dim || f[i].cols() != f.generator_count) {
      throw ValidationError("shape_mismatch", "fiber matrix has the wrong shape", {i});
    }
    if (!f[i].allFinite()) throw ValidationError("non_finite", "non-finite fiber entry", {i});
  }
}

template <typename Scalar>
void validate(const HermitianField<Scalar>& a, bool psd) {
  if (a.size() != a.grid.size()) throw ValidationError("shape_mismatch", "field/grid size mismatch");
  for (Index i = 0; i < a.size(); ++i) {
    const auto& m = a[i];
    if (m.rows() != a.dim || m.cols() != a.dim) {
      throw ValidationError("shape_mismatch", "Hermitian fiber has the wrong shape", {i});
    }
    const double norm = spectral_norm(m);
    if ((m - m.adjoint()).norm() > tolerance::hermitian * (1.0 + norm)) {
      throw ValidationError("not_hermitian", "fiber matrix is not Hermitian", {i});
    }
    if (psd && a.dim > 0) {
      const double smallest = hermitian_eigenvalues<Scalar>(hermitian_part<Scalar>(m)).minCoeff();
      if (smallest < -tolerance::psd * norm) {
        throw ValidationError("not_psd", "fiber matrix is not positive semidefinite", {i});
      }
    }
  }
}

template <typename Scalar>
void validate(const SubspaceField<Scalar>& v) {
  if (v.size() != v.grid.size()) throw ValidationError("shape_mismatch", "field/grid size mismatch");
  for (Index i = 0; i < v.size(); ++i) {
    const auto& b = v[i];
    if (b.rows() != v.ambient_dim || b.cols() > v.ambient_dim) {
      throw ValidationError("shape_mismatch", "subspace basis has the wrong shape", {i});
    }
    const Matrix<Scalar> gram = b.adjoint() * b;
    if ((gram - Matrix<Scalar>::Identity(b.cols(), b.cols())).norm() > tolerance::orthonormal) {
      throw ValidationError("not_orthonormal", "subspace basis is not orthonormal", {i});
    }
  }
}

template <typename A, typename B>
void require_same_layout(const A& a, const B& b, const char* what) {
  if (!(a.grid == b.grid) || a.ambient_dim != b.ambient_dim) {
    throw ValidationError("shape_mismatch", std::string(what) + ": grid or ambient dimension differ");
  }
}

}  // namespace fsi
