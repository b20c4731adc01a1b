#pragma once

#include "fsi/frame_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fsi {

/// Per-fiber angles together with their extreme value over the grid.
struct AngleField {
  Eigen::VectorXd cosines;
  Eigen::VectorXd angles;
  double extreme = 0.0;  // inf for Dixmier angles, sup for apertures
};

inline double clamped_acos(double c) { return std::acos(std::clamp(c, 0.0, 1.0)); }

/// Dixmier angle: cos = σ_max(B_A*·B_B), 0 when either fiber is trivial.
/// `extreme` is the minimum angle over all fibers.
template <typename Scalar>
AngleField dixmier_angle(const SubspaceField<Scalar>& a, const SubspaceField<Scalar>& b) {
  require_same_layout(a, b, "dixmier_angle");
  AngleField out{Eigen::VectorXd::Zero(a.size()), Eigen::VectorXd::Zero(a.size()), std::numbers::pi / 2};
  for (Index i = 0; i < a.size(); ++i) {
    double c = 0.0;
    if (a.dim(i) > 0 && b.dim(i) > 0) {
      const Matrix<Scalar> cross = a[i].adjoint() * b[i];
      c = singular_values<Scalar>(cross)(0);
    }
    out.cosines(i) = std::clamp(c, 0.0, 1.0);
    out.angles(i) = clamped_acos(c);
    out.extreme = std::min(out.extreme, out.angles(i));
  }
  return out;
}

/// Aperture: cos = inf over unit t ∈ T of ‖P_S t‖ = σ_min(B_S*·B_T), which is 0
/// when d_S < d_T. `extreme` is the maximum angle over fibers with d_T > 0.
template <typename Scalar>
AngleField aperture_angle(const SubspaceField<Scalar>& s, const SubspaceField<Scalar>& t) {
  require_same_layout(s, t, "aperture_angle");
  AngleField out{Eigen::VectorXd::Ones(s.size()), Eigen::VectorXd::Zero(s.size()), 0.0};
  for (Index i = 0; i < s.size(); ++i) {
    if (t.dim(i) == 0) continue;
    double c = 0.0;
    if (s.dim(i) >= t.dim(i)) {
      const Matrix<Scalar> cross = s[i].adjoint() * t[i];
      c = singular_values<Scalar>(cross)(t.dim(i) - 1);
    }
    out.cosines(i) = std::clamp(c, 0.0, 1.0);
    // acos loses half the digits near 1; the sine sup ‖(I − P_S)t‖ is attained
    // at the same t, so atan2 keeps small apertures accurate.
    Matrix<Scalar> residual = t[i];
    if (s.dim(i) > 0) residual -= s[i] * (s[i].adjoint() * t[i]);
    const double sine = std::min(1.0, singular_values<Scalar>(residual)(0));
    out.angles(i) = std::atan2(sine, out.cosines(i));
    out.extreme = std::max(out.extreme, out.angles(i));
  }
  return out;
}

/// A pair of range functions with J_V(x) ⊕ J_W(x)⊥ = ambient space on every
/// fiber, and the oblique projections P(x) = P_{J_V(x)//J_W(x)⊥}.
template <typename Scalar>
struct ObliquePair {
  SubspaceField<Scalar> V;
  SubspaceField<Scalar> W;
  std::vector<Matrix<Scalar>> projection;
  double proj_norm_sup = 0.0;
  double dixmier_inf = std::numbers::pi / 2;  // inf over fibers of [J_V, J_W⊥]_D
  double aperture_sup = 0.0;                  // sup over fibers of [J_V, J_W]^a

  Index size() const { return static_cast<Index>(projection.size()); }
  const Matrix<Scalar>& operator[](Index i) const { return projection[static_cast<std::size_t>(i)]; }
  /// P_{J_W(x)//J_V(x)⊥} = P(x)*.
  Matrix<Scalar> adjoint_projection(Index i) const { return (*this)[i].adjoint(); }
};

template <typename Scalar>
ObliquePair<Scalar> check_oblique_sum(const SubspaceField<Scalar>& v, const SubspaceField<Scalar>& w) {
  validate(v);
  validate(w);
  require_same_layout(v, w, "check_oblique_sum");
  const Index L = v.ambient_dim;
  ObliquePair<Scalar> out{v, w, std::vector<Matrix<Scalar>>(static_cast<std::size_t>(v.size())), 0.0,
                          std::numbers::pi / 2, 0.0};
  std::vector<int> failed(static_cast<std::size_t>(v.size()), 0);
  std::vector<double> norms(static_cast<std::size_t>(v.size()), 0.0);
  std::vector<double> dixmier(static_cast<std::size_t>(v.size()), std::numbers::pi / 2);
  parallel_for(v.size(), [&](Index i) {
    const auto slot = static_cast<std::size_t>(i);
    const Index d = v.dim(i);
    if (d != w.dim(i)) {
      failed[slot] = 1;
      return;
    }
    if (d == 0) {
      out.projection[slot] = Matrix<Scalar>::Zero(L, L);
      return;
    }
    const Matrix<Scalar> cross = w[i].adjoint() * v[i];
    const Eigen::VectorXd sigma = singular_values<Scalar>(cross);
    // σ(C) ≤ 1 for orthonormal bases, so the second test bounds ‖P‖ as well.
    if (!(sigma(d - 1) > 0.0) || sigma(0) > tolerance::oblique_condition * sigma(d - 1) ||
        tolerance::oblique_condition * sigma(d - 1) < 1.0) {
      failed[slot] = 1;
      return;
    }
    out.projection[slot] = v[i] * cross.inverse() * w[i].adjoint();
    norms[slot] = 1.0 / sigma(d - 1);
    const Matrix<Scalar> w_perp = orthogonal_complement<Scalar>(w[i], L);
    if (w_perp.cols() > 0) {
      const Matrix<Scalar> c2 = v[i].adjoint() * w_perp;
      dixmier[slot] = clamped_acos(singular_values<Scalar>(c2)(0));
    }
  });
  std::vector<Index> bad;
  for (Index i = 0; i < v.size(); ++i) {
    if (failed[static_cast<std::size_t>(i)]) bad.push_back(i);
  }
  if (!bad.empty()) {
    throw InfeasibleError("direct_sum_failure",
                          "J_V(x) + J_W(x)⊥ is not a direct sum (unequal dimensions or ill-conditioned "
                          "cross Gramian)",
                          std::move(bad));
  }
  for (Index i = 0; i < v.size(); ++i) {
    out.proj_norm_sup = std::max(out.proj_norm_sup, norms[static_cast<std::size_t>(i)]);
    out.dixmier_inf = std::min(out.dixmier_inf, dixmier[static_cast<std::size_t>(i)]);
  }
  out.aperture_sup = aperture_angle(v, w).extreme;
  return out;
}

struct AliasingReport {
  double direct = 0.0;    // max over fibers of ‖P_{W//V⊥}(x)·(I − P_W(x))‖
  double formula = 0.0;   // tan of the supremal aperture
  Index worst_fiber = -1;
};

/// Norm of P_{W//V⊥} restricted to W⊥. Throws InternalError when the direct
/// value and tan(aperture) disagree beyond tolerance.
template <typename Scalar>
AliasingReport aliasing_norm(const ObliquePair<Scalar>& pair) {
  AliasingReport out;
  const Index L = pair.W.ambient_dim;
  for (Index i = 0; i < pair.size(); ++i) {
    const Matrix<Scalar> complement = Matrix<Scalar>::Identity(L, L) - pair.W.projector(i);
    const double value = spectral_norm(pair.adjoint_projection(i) * complement);
    if (value > out.direct || out.worst_fiber < 0) {
      out.direct = std::max(out.direct, value);
      out.worst_fiber = i;
    }
  }
  out.formula = std::tan(pair.aperture_sup);
  if (std::abs(out.direct - out.formula) > tolerance::consistency * (1.0 + out.direct)) {
    throw InternalError("aliasing_mismatch",
                        "direct aliasing norm disagrees with tan(aperture): " + std::to_string(out.direct) +
                            " vs " + std::to_string(out.formula),
                        {out.worst_fiber});
  }
  return out;
}

/// Canonical V-dual: columns P(x)·S(x)†·F(x). Requires F to be a frame for W.
template <typename Scalar>
SystemField<Scalar> canonical_dual(const FrameAnalysis<Scalar>& a, const SubspaceField<Scalar>& w,
                                   const ObliquePair<Scalar>& pair) {
  const FrameBounds bounds = frame_bounds(a, w);
  if (!bounds.is_frame) {
    throw InfeasibleError("not_a_frame", "canonical dual requires a frame: " + bounds.reason, bounds.deficient);
  }
  if (pair.size() != a.size()) throw ValidationError("shape_mismatch", "canonical_dual: pair/grid mismatch");
  SystemField<Scalar> g{a.system.grid, a.system.ambient_dim, a.system.generator_count,
                        std::vector<Matrix<Scalar>>(a.system.fibers.size())};
  parallel_for(a.size(), [&](Index i) { g[i] = pair[i] * (a.frame_op_pinv(i) * a.system[i]); });
  return g;
}

struct DualityCheck {
  bool holds = false;
  double max_residual = 0.0;
  Index worst_fiber = -1;
};

/// Checks T_F(x)·T_G(x)* = P_{J_W(x)//J_V(x)⊥} on every fiber.
template <typename Scalar>
DualityCheck verify_duality(const SystemField<Scalar>& f, const SystemField<Scalar>& g,
                            const ObliquePair<Scalar>& pair, double tol = tolerance::duality) {
  if (f.size() != g.size() || f.size() != pair.size() || f.ambient_dim != g.ambient_dim ||
      f.generator_count != g.generator_count) {
    throw ValidationError("shape_mismatch", "verify_duality: system shapes differ");
  }
  DualityCheck out;
  for (Index i = 0; i < f.size(); ++i) {
    const double r = spectral_norm(f[i] * g[i].adjoint() - pair.adjoint_projection(i));
    if (out.worst_fiber < 0 || r > out.max_residual) {
      out.max_residual = r;
      out.worst_fiber = i;
    }
  }
  out.holds = out.max_residual <= tol;
  return out;
}

}  // namespace fsi
