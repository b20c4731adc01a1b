#pragma once

#include "fsi/majorization.hpp"
#include "fsi/spectral_design.hpp"

#include <algorithm>
#include <functional>

namespace fsi {

/// Σ_x weight·[Σ_{j≤r(x)} φ(λ_j(x)) + (d(x) − r(x))·φ(0)], where d is the
/// dimension function of the reference subspace.
template <typename Scalar>
double convex_potential(const FrameAnalysis<Scalar>& a, const SubspaceField<Scalar>& w, const ConvexSpec& phi) {
  double total = 0.0;
  const double phi0 = phi(0.0);
  for (Index i = 0; i < a.size(); ++i) {
    const auto slot = static_cast<std::size_t>(i);
    const Index r = std::min(a.rank[slot], w.dim(i));
    double fiber = 0.0;
    for (Index j = 0; j < r; ++j) fiber += phi(a.eigen.values[slot](j));
    fiber += static_cast<double>(w.dim(i) - r) * phi0;
    total += fiber;
  }
  return total * a.eigen.grid.weight();
}

struct PotentialReport {
  std::string phi;
  double value = 0.0;
  bool applicable = false;  // Σ‖fᵢ‖² = 1
  double lower_bound = 0.0;
  double tightness_gap = 0.0;
  bool is_tight = false;    // S(x) = const⁻¹·P_{J_W(x)} on every fiber
};

/// Potential together with the bound const·φ(1/const) valid for systems of
/// unit total norm.
template <typename Scalar>
PotentialReport potential_bound(const FrameAnalysis<Scalar>& a, const SubspaceField<Scalar>& w,
                                const ConvexSpec& phi) {
  PotentialReport out;
  out.phi = phi.name;
  out.value = convex_potential(a, w, phi);
  const double constant = weight_profile(w).constant;
  const double norm = trace_integral(a);
  out.applicable = std::abs(norm - 1.0) <= tolerance::consistency && constant > 0.0;
  if (!out.applicable) return out;
  out.lower_bound = constant * phi(1.0 / constant);
  out.tightness_gap = out.value - out.lower_bound;
  out.is_tight = true;
  for (Index i = 0; i < a.size() && out.is_tight; ++i) {
    const Matrix<Scalar> diff = a.frame_op[i] - w.projector(i) / static_cast<RealOf<Scalar>>(constant);
    if (spectral_norm(diff) > tolerance::consistency) out.is_tight = false;
  }
  return out;
}

/// r(x) = max{2d(x) − n, 0}: the number of top eigenvalues kept untouched.
inline Index kept_slots(Index d, Index n) { return std::max<Index>(2 * d - n, 0); }

/// Per-fiber eigenvalues of the non-commutative water-filling: λ_i for
/// i ≤ r(x), max{λ_i, c} for r(x) < i ≤ d(x), zero beyond.
inline Eigen::VectorXd nc_waterfill_values(const Eigen::VectorXd& lambda, Index d, Index n, double c) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const Index r = kept_slots(d, n);
  for (Index i = 0; i < d; ++i) out(i) = i < r ? lambda(i) : std::max(lambda(i), c);
  return out;
}

/// Σ_{i≤r} λ_i v_i v_i* + Σ_{r<i≤d} max{λ_i, c} v_i v_i* in the eigenbasis of S#.
template <typename Scalar>
HermitianField<Scalar> nc_waterfill(const CanonicalDual<Scalar>& canon, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("invalid_level", "water level must be >= 0");
  const Index L = canon.generators.ambient_dim;
  HermitianField<Scalar> out{canon.generators.grid, L, std::vector<Matrix<Scalar>>(canon.dims.size())};
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    const Index d = canon.d(x);
    const auto& vs = canon.vectors(x);
    const Eigen::VectorXd values = nc_waterfill_values(canon.lambda(x), d, canon.n, c).head(d);
    out[x] = d == 0 ? Matrix<Scalar>::Zero(L, L)
                    : Matrix<Scalar>(vs.leftCols(d) * values.cast<Scalar>().asDiagonal() * vs.leftCols(d).adjoint());
  }
  return out;
}

/// The flooded part: Σ_{i>r} (c − λ_i)⁺ v_i v_i*.
template <typename Scalar>
HermitianField<Scalar> nc_waterfill_increment(const CanonicalDual<Scalar>& canon, double c) {
  const Index L = canon.generators.ambient_dim;
  HermitianField<Scalar> out{canon.generators.grid, L, std::vector<Matrix<Scalar>>(canon.dims.size())};
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    const Index d = canon.d(x);
    const Index r = kept_slots(d, canon.n);
    Matrix<Scalar> b = Matrix<Scalar>::Zero(L, L);
    const auto& vs = canon.vectors(x);
    for (Index i = r; i < d; ++i) {
      const double lift = std::max(0.0, c - canon.lambda(x)(i));
      if (lift > 0.0) b += static_cast<RealOf<Scalar>>(lift) * vs.col(i) * vs.col(i).adjoint();
    }
    out[x] = std::move(b);
  }
  return out;
}

/// The flooding domain Y: one atom (λ#_{d−j+1}(x), weight) per fiber and
/// j ≤ min{d(x), n − d(x)}.
template <typename Scalar>
StepFunction flooding_domain(const CanonicalDual<Scalar>& canon) {
  std::vector<Atom> atoms;
  const double weight = canon.generators.grid.weight();
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    const Index d = canon.d(x);
    const Index m = std::min(d, canon.n - d);
    for (Index j = 1; j <= m; ++j) atoms.push_back({canon.lambda(x)(d - j), weight});
  }
  return StepFunction(std::move(atoms));
}

template <typename Scalar>
struct OptimalDualResult {
  DualDesign<Scalar> design;
  double c_level = 0.0;
  double w_target = 0.0;
  double w0 = 0.0;             // Σᵢ‖f#ᵢ‖²
  double achieved_norm = 0.0;  // Σᵢ‖g_iᵒᵖ‖²
  std::vector<Index> kept;     // r(x)
  SpectrumField mu;
};

/// The norm-constrained optimal V-dual: S_G = NC water-filling of S# at the
/// level c for which Σᵢ‖gᵢ‖² = w.
template <typename Scalar>
OptimalDualResult<Scalar> optimal_dual(const CanonicalDual<Scalar>& canon, const SubspaceField<Scalar>& v,
                                       double w) {
  OptimalDualResult<Scalar> out;
  out.w0 = trace_integral(canon.analysis);
  out.w_target = w;
  const double slack = tolerance::consistency * (1.0 + std::abs(out.w0));
  if (!std::isfinite(w) || w < out.w0 - slack) {
    throw ValidationError("norm_below_canonical", "target norm w is below the canonical dual norm w0 = " +
                                                      std::to_string(out.w0));
  }
  const StepFunction y = flooding_domain(canon);
  if (y.size() == 0) {
    if (w > out.w0 + slack) {
      throw InfeasibleError("norm_unreachable", "no fiber admits a perturbation (min{d, n - d} = 0 everywhere)");
    }
    out.c_level = 0.0;
  } else {
    const double mass = y.total_mass();
    const double target = std::max(0.0, w - out.w0) + y.integral();
    out.c_level = waterfill_level(y.normalized(), target / mass);
  }
  const Index n = canon.n;
  out.mu = SpectrumField{canon.generators.grid, n, RealLists(canon.dims.size())};
  out.kept.resize(canon.dims.size());
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    Eigen::VectorXd xi = nc_waterfill_values(canon.lambda(x), canon.d(x), n, out.c_level);
    std::sort(xi.data(), xi.data() + xi.size(), std::greater<double>());
    out.mu.values[slot] = xi;
    out.kept[slot] = kept_slots(canon.d(x), n);
  }
  out.design = design_from_perturbation(nc_waterfill_increment(canon, out.c_level), canon, v);
  out.achieved_norm = norm_squared(out.design.G);
  return out;
}

struct UniquenessReport {
  bool b_matches = false;
  bool spectrum_matches = false;
  bool commutes = false;
  double b_residual = 0.0;
  double spectrum_residual = 0.0;
  double commutator = 0.0;
};

/// Checks the structure forced on optimal duals for strictly convex φ:
/// B = S_G − S# equals Σ_{i>r}(c − λ#_i)⁺ v_i v_i*, λ(S_G) is the
/// NC-waterfilled spectrum and B commutes with S#.
template <typename Scalar>
UniquenessReport uniqueness_probe(const OptimalDualResult<Scalar>& result, const CanonicalDual<Scalar>& canon,
                                  const ConvexSpec& phi_strict) {
  if (!phi_strict.strictly_convex() || !phi_strict.nondecreasing()) {
    throw ValidationError("unknown_phi", "uniqueness probe needs a strictly convex nondecreasing preset");
  }
  UniquenessReport out;
  const auto expected = nc_waterfill_increment(canon, result.c_level);
  const auto s_g = frame_operator(result.design.G);
  const auto& s_sharp = canon.analysis.frame_op;
  for (Index x = 0; x < s_g.size(); ++x) {
    const Matrix<Scalar> b = s_g[x] - s_sharp[x];
    out.b_residual = std::max(out.b_residual, spectral_norm(b - expected[x]));
    out.commutator = std::max(out.commutator, spectral_norm(s_sharp[x] * b - b * s_sharp[x]));
    const Eigen::VectorXd got = hermitian_eigenvalues<Scalar>(hermitian_part<Scalar>(s_g[x]));
    const auto& want = result.mu.values[static_cast<std::size_t>(x)];
    for (Index j = 0; j < got.size(); ++j) {
      const double target = j < want.size() ? want(j) : 0.0;
      out.spectrum_residual = std::max(out.spectrum_residual, std::abs(got(j) - target));
    }
  }
  out.b_matches = out.b_residual <= tolerance::consistency;
  out.spectrum_matches = out.spectrum_residual <= tolerance::consistency;
  out.commutes = out.commutator <= tolerance::consistency;
  return out;
}

struct ConditionReport {
  bool improves = true;
  Eigen::VectorXd optimal;    // λ₁/λ_d of S_G, 1 outside Spec
  Eigen::VectorXd canonical;  // λ₁/λ_d of S#
  std::vector<Index> failing;
  // Fibers where λ_d(S_G) < max{c, λ#_d}. Only 2d > n with c above λ#_r can
  // land here, and only these fibers can fail the comparison.
  std::vector<Index> premise_failing;
};

template <typename Scalar>
ConditionReport condition_improvement_check(const OptimalDualResult<Scalar>& result,
                                            const CanonicalDual<Scalar>& canon) {
  ConditionReport out;
  const Index size = canon.analysis.size();
  out.optimal = Eigen::VectorXd::Ones(size);
  out.canonical = Eigen::VectorXd::Ones(size);
  const auto s_g = frame_operator(result.design.G);
  for (Index x = 0; x < size; ++x) {
    const Index d = canon.d(x);
    if (d == 0) continue;
    const Eigen::VectorXd mu = hermitian_eigenvalues<Scalar>(hermitian_part<Scalar>(s_g[x]));
    const auto& lam = canon.lambda(x);
    out.optimal(x) = mu(0) / mu(d - 1);
    out.canonical(x) = lam(0) / lam(d - 1);
    if (out.optimal(x) > out.canonical(x) + 1e-9) out.failing.push_back(x);
    const double floor = std::max(result.c_level, lam(d - 1));
    if (mu(d - 1) < floor - tolerance::consistency * (1.0 + floor)) out.premise_failing.push_back(x);
  }
  out.improves = out.failing.empty();
  return out;
}

}  // namespace fsi
