#pragma once

#include "fsi/fields.hpp"
#include "fsi/parallel.hpp"

#include <Eigen/QR>

namespace fsi {

/// Range function of the span of a system: per fiber, the left singular
/// vectors whose singular values exceed rank_tol·σ₁.
template <typename Scalar>
SubspaceField<Scalar> subspace_from_system(const SystemField<Scalar>& f,
                                           double rank_tol = tolerance::rank) {
  validate(f);
  if (!(rank_tol > 0.0)) throw ValidationError("invalid_tolerance", "rank_tol must be positive");
  SubspaceField<Scalar> v{f.grid, f.ambient_dim, std::vector<Matrix<Scalar>>(f.fibers.size())};
  parallel_for(f.size(), [&](Index i) {
    const auto& t = f[i];
    Matrix<Scalar> basis(f.ambient_dim, 0);
    if (t.cols() > 0 && t.squaredNorm() > 0.0) {
      Eigen::JacobiSVD<Matrix<Scalar>> svd(t, Eigen::ComputeThinU);
      const Index d = numerical_rank(svd.singularValues(), rank_tol);
      basis = svd.matrixU().leftCols(d);
      normalize_column_phases(basis);
    }
    v.bases[static_cast<std::size_t>(i)] = std::move(basis);
  });
  return v;
}

/// Orthonormalizes arbitrary per-fiber bases (full column rank assumed).
template <typename Scalar>
SubspaceField<Scalar> orthonormalize(const TorusGrid& grid, Index L, const std::vector<Matrix<Scalar>>& spans) {
  SubspaceField<Scalar> v{grid, L, std::vector<Matrix<Scalar>>(spans.size())};
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const Index d = spans[i].cols();
    Matrix<Scalar> q(L, d);
    if (d > 0) {
      Eigen::HouseholderQR<Matrix<Scalar>> qr(spans[i]);
      q = qr.householderQ() * Matrix<Scalar>::Identity(L, d);
      normalize_column_phases(q);
    }
    v.bases[i] = std::move(q);
  }
  return v;
}

/// Distribution of the dimension function: p[i] is the measure of {d = i},
/// `constant` is Σ i·pᵢ and `spectrum_mass` the measure of {d ≥ 1}.
struct WeightProfile {
  std::vector<double> p;
  double constant = 0.0;
  double spectrum_mass = 0.0;
};

template <typename Scalar>
WeightProfile weight_profile(const SubspaceField<Scalar>& v) {
  WeightProfile out;
  Index max_d = 0;
  for (Index i = 0; i < v.size(); ++i) max_d = std::max(max_d, v.dim(i));
  out.p.assign(static_cast<std::size_t>(max_d + 1), 0.0);
  // Integer counts first, then one multiplication: exact for uniform weights.
  std::vector<Index> counts(static_cast<std::size_t>(max_d + 1), 0);
  for (Index i = 0; i < v.size(); ++i) ++counts[static_cast<std::size_t>(v.dim(i))];
  const double w = v.grid.weight();
  Index weighted = 0;
  Index in_spec = 0;
  for (std::size_t d = 0; d < counts.size(); ++d) {
    out.p[d] = static_cast<double>(counts[d]) * w;
    weighted += static_cast<Index>(d) * counts[d];
    if (d > 0) in_spec += counts[d];
  }
  out.constant = static_cast<double>(weighted) * w;
  out.spectrum_mass = static_cast<double>(in_spec) * w;
  return out;
}

}  // namespace fsi
