#pragma once

#include "fsi/fields.hpp"
#include "fsi/majorization.hpp"
#include "fsi/parallel.hpp"
#include "fsi/subspace.hpp"

#include <limits>
#include <optional>

namespace fsi {

/// Per-fiber operators of a system together with the fine spectral structure
/// of its frame operator.
template <typename Scalar>
struct FrameAnalysis {
  SystemField<Scalar> system;
  HermitianField<Scalar> gramian;    // n×n
  HermitianField<Scalar> frame_op;   // L×L
  EigenField<Scalar> eigen;          // length n; vectors hold the first r(x) slots
  std::vector<Index> rank;           // r(x)
  double bessel_bound = 0.0;
  double rank_tol = tolerance::rank;

  Index size() const { return system.size(); }
  Index generator_count() const { return system.generator_count; }

  /// Moore-Penrose inverse of S(x) with the rank cut at r(x).
  Matrix<Scalar> frame_op_pinv(Index i) const {
    const auto& v = eigen.vectors[static_cast<std::size_t>(i)];
    const Index r = rank[static_cast<std::size_t>(i)];
    const Eigen::VectorXd inv = eigen.values[static_cast<std::size_t>(i)].head(r).cwiseInverse();
    return v * inv.cast<Scalar>().asDiagonal() * v.adjoint();
  }
};

/// Fine spectral structure of a system: eigenpairs of S(x) = F(x)F(x)* taken
/// from the SVD of F(x). Values are padded to `length` with exact zeros.
template <typename Scalar>
void spectral_structure(const SystemField<Scalar>& f, double rank_tol, Index length, EigenField<Scalar>& eigen,
                        std::vector<Index>& rank) {
  const std::size_t count = f.fibers.size();
  eigen = EigenField<Scalar>{f.grid, length, RealLists(count), std::vector<Matrix<Scalar>>(count)};
  rank.assign(count, 0);
  parallel_for(f.size(), [&](Index i) {
    const auto& t = f[i];
    const auto slot = static_cast<std::size_t>(i);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(length);
    Matrix<Scalar> vectors(f.ambient_dim, 0);
    Index r = 0;
    if (t.size() > 0 && t.squaredNorm() > 0.0) {
      Eigen::JacobiSVD<Matrix<Scalar>> svd(t, Eigen::ComputeThinU);
      const Eigen::VectorXd sigma = svd.singularValues();
      r = numerical_rank(sigma, rank_tol);
      const double top = sigma(0) * sigma(0);
      for (Index j = 0; j < r; ++j) {
        const double lambda = sigma(j) * sigma(j);
        values(j) = lambda > tolerance::eigen_clamp * top ? lambda : 0.0;
      }
      vectors = svd.matrixU().leftCols(r);
      normalize_column_phases(vectors);
    }
    eigen.values[slot] = std::move(values);
    eigen.vectors[slot] = std::move(vectors);
    rank[slot] = r;
  });
}

/// Columns of F(x) must lie in J_W(x); throws ValidationError naming every
/// offending fiber otherwise.
template <typename Scalar>
void require_inside(const SystemField<Scalar>& f, const SubspaceField<Scalar>& w, const char* what) {
  require_same_layout(f, w, what);
  std::vector<Index> bad;
  for (Index i = 0; i < f.size(); ++i) {
    const auto& b = w[i];
    Matrix<Scalar> residual = f[i];
    if (b.cols() > 0) residual -= b * (b.adjoint() * f[i]);
    const double scale = std::max(1.0, f[i].norm());
    if (residual.norm() > tolerance::membership * scale) bad.push_back(i);
  }
  if (!bad.empty()) {
    throw ValidationError("outside_subspace", std::string(what) + ": generators are not inside the subspace",
                          std::move(bad));
  }
}

template <typename Scalar>
FrameAnalysis<Scalar> analyze(const SystemField<Scalar>& f, const SubspaceField<Scalar>& w,
                              double rank_tol = tolerance::rank) {
  validate(f);
  validate(w);
  if (!(rank_tol > 0.0)) throw ValidationError("invalid_tolerance", "rank_tol must be positive");
  require_inside(f, w, "analyze");
  FrameAnalysis<Scalar> a;
  a.system = f;
  a.rank_tol = rank_tol;
  a.gramian = gramian(f);
  a.frame_op = frame_operator(f);
  spectral_structure(f, rank_tol, f.generator_count, a.eigen, a.rank);
  for (const auto& v : a.eigen.values) {
    if (v.size() > 0) a.bessel_bound = std::max(a.bessel_bound, v(0));
  }
  return a;
}

/// Optimal frame bounds for J_W, or the fibers where the system fails to be
/// a frame.
struct FrameBounds {
  bool is_frame = false;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<Index> deficient;  // fibers with r(x) < d(x)
  std::string reason;
};

template <typename Scalar>
FrameBounds frame_bounds(const FrameAnalysis<Scalar>& a, const SubspaceField<Scalar>& w) {
  FrameBounds out;
  out.upper = a.bessel_bound;
  double lower = std::numeric_limits<double>::infinity();
  bool any = false;
  for (Index i = 0; i < a.size(); ++i) {
    const Index d = w.dim(i);
    if (d == 0) continue;
    any = true;
    if (a.rank[static_cast<std::size_t>(i)] < d) {
      out.deficient.push_back(i);
      continue;
    }
    lower = std::min(lower, a.eigen.values[static_cast<std::size_t>(i)](d - 1));
  }
  if (!out.deficient.empty()) {
    out.reason = "rank deficient on some fiber";
    return out;
  }
  out.lower = any ? lower : 0.0;
  if (any && out.lower <= a.rank_tol * out.upper) {
    out.reason = "lower frame bound vanishes";
    return out;
  }
  out.is_frame = true;
  if (!any) out.lower = out.upper = 0.0;
  return out;
}

/// The eigenvalue field as a step function over the disjoint union of the
/// sets {x : d(x) ≥ j}: one atom (λ_j(x), weight) per fiber and slot j ≤ d(x).
struct EigenStepFunction {
  StepFunction raw;         // total mass is const
  StepFunction normalized;  // probability version; empty when Spec is empty
  double constant = 0.0;
};

template <typename Scalar>
EigenStepFunction eigenvalue_stepfunction(const FrameAnalysis<Scalar>& a, const SubspaceField<Scalar>& w) {
  std::vector<Atom> atoms;
  const double weight = a.eigen.grid.weight();
  for (Index i = 0; i < a.size(); ++i) {
    const auto& values = a.eigen.values[static_cast<std::size_t>(i)];
    for (Index j = 0; j < w.dim(i); ++j) atoms.push_back({j < values.size() ? values(j) : 0.0, weight});
  }
  EigenStepFunction out;
  out.raw = StepFunction(std::move(atoms));
  out.constant = weight_profile(w).constant;
  if (out.raw.size() > 0) out.normalized = out.raw.normalized();
  return out;
}

/// τ(x) = tr(T(x)·P_{J_W(x)}).
template <typename Scalar>
Eigen::VectorXd local_trace(const HermitianField<Scalar>& t, const SubspaceField<Scalar>& w) {
  if (!(t.grid == w.grid) || t.dim != w.ambient_dim) {
    throw ValidationError("shape_mismatch", "local_trace: operator and subspace layouts differ");
  }
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(t.size());
  for (Index i = 0; i < t.size(); ++i) {
    const auto& b = w[i];
    if (b.cols() == 0) continue;
    tau(i) = std::real((b.adjoint() * t[i] * b).trace());
  }
  return tau;
}

/// Σ_x weight·tr(S(x)), which equals Σᵢ‖fᵢ‖².
template <typename Scalar>
double trace_integral(const FrameAnalysis<Scalar>& a) {
  double total = 0.0;
  for (const auto& v : a.eigen.values) total += v.sum();
  return total * a.eigen.grid.weight();
}

}  // namespace fsi
