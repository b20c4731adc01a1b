#pragma once

#include "fsi/oblique.hpp"

#include <numeric>
#include <string>

namespace fsi {

namespace detail {

/// Isometry W (n×(n−1), real) with λ(W*·diag(λ)·W) = β, for λ non-increasing
/// and λ_j ≥ β_j ≥ λ_{j+1}. Equalities within `tol` are deflated with the
/// matching coordinate vector; the strict remainder uses the secular weights
/// γ_j = ∏ᵢ(λ_j − βᵢ) / ∏_{k≠j}(λ_j − λ_k).
inline Eigen::MatrixXd fan_pall_diagonal(const Eigen::VectorXd& lambda, const Eigen::VectorXd& beta, double tol) {
  const Index n = lambda.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n - 1);
  if (n <= 1) return w;

  for (Index i = 0; i < n - 1; ++i) {
    Index removed = -1;
    if (std::abs(beta(i) - lambda(i)) <= tol) {
      removed = i;
    } else if (std::abs(beta(i) - lambda(i + 1)) <= tol) {
      removed = i + 1;
    }
    if (removed < 0) continue;
    Eigen::VectorXd lam_rest(n - 1), beta_rest(n - 2);
    for (Index j = 0, k = 0; j < n; ++j) {
      if (j != removed) lam_rest(k++) = lambda(j);
    }
    for (Index j = 0, k = 0; j < n - 1; ++j) {
      if (j != i) beta_rest(k++) = beta(j);
    }
    const Eigen::MatrixXd sub = fan_pall_diagonal(lam_rest, beta_rest, tol);
    for (Index c = 0, k = 0; c < n - 1; ++c) {
      if (c == i) {
        w(removed, c) = 1.0;
        continue;
      }
      for (Index j = 0, row = 0; j < n; ++j) {
        if (j != removed) w(j, c) = sub(row++, k);
      }
      ++k;
    }
    return w;
  }

  Eigen::VectorXd v(n);
  for (Index j = 0; j < n; ++j) {
    double num = 1.0, den = 1.0;
    for (Index i = 0; i < n - 1; ++i) num *= lambda(j) - beta(i);
    for (Index k = 0; k < n; ++k) {
      if (k != j) den *= lambda(j) - lambda(k);
    }
    v(j) = std::sqrt(std::max(0.0, num / den));
  }
  v.normalize();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - 1);
}

/// Checks λ_j ≥ β_j ≥ λ_{n−d+j} within tol; returns β clipped into the
/// admissible intervals or throws naming the fiber and the slot.
inline Eigen::VectorXd clip_interlacing(const Eigen::VectorXd& lambda, const Eigen::VectorXd& beta, double tol,
                                        Index fiber) {
  const Index n = lambda.size();
  const Index d = beta.size();
  Eigen::VectorXd out = beta;
  for (Index j = 0; j < d; ++j) {
    const double hi = lambda(j);
    const double lo = lambda(n - d + j);
    if (!std::isfinite(beta(j)) || beta(j) > hi + tol || beta(j) < lo - tol) {
      throw ValidationError("interlacing_violation",
                            "interlacing fails at slot " + std::to_string(j + 1) + ": need " + std::to_string(lo) +
                                " <= " + std::to_string(beta(j)) + " <= " + std::to_string(hi),
                            {fiber});
    }
    out(j) = std::clamp(beta(j), lo, hi);
  }
  return out;
}

inline double interlacing_tol(double norm) { return tolerance::interlacing * (1.0 + norm); }

}  // namespace detail

/// One Fan-Pall step for a single Hermitian matrix: an isometry
/// W (n×(n−1)) with λ(W*·G·W) = β.
template <typename Scalar>
Matrix<Scalar> fan_pall_step(const Matrix<Scalar>& g, const Eigen::VectorXd& beta, Index fiber = 0) {
  const Index n = g.rows();
  if (g.cols() != n || beta.size() != n - 1 || n < 1) {
    throw ValidationError("shape_mismatch", "fan_pall_step: need an n×n matrix and n−1 targets", {fiber});
  }
  const auto eig = hermitian_eigen<Scalar>(hermitian_part<Scalar>(g));
  const double tol = detail::interlacing_tol(eig.values.cwiseAbs().maxCoeff());
  const Eigen::VectorXd target = detail::clip_interlacing(eig.values, beta, tol, fiber);
  const Eigen::MatrixXd wd = detail::fan_pall_diagonal(eig.values, target, tol);
  return eig.vectors * wd.cast<Scalar>();
}

/// Field version: W(x) for every fiber.
template <typename Scalar>
std::vector<Matrix<Scalar>> fan_pall_step(const HermitianField<Scalar>& g, const RealLists& beta) {
  if (static_cast<Index>(beta.size()) != g.size()) {
    throw ValidationError("shape_mismatch", "fan_pall_step: one target list per fiber required");
  }
  std::vector<Matrix<Scalar>> out(beta.size());
  parallel_for(g.size(), [&](Index i) { out[static_cast<std::size_t>(i)] = fan_pall_step<Scalar>(g[i], beta[static_cast<std::size_t>(i)], i); });
  return out;
}

/// Levels γ₀ = λ, …, γ_{n−d} = β, each of length n − i, with consecutive
/// levels interlacing: γ_{i,j} ≥ γ_{i+1,j} ≥ γ_{i,j+1}.
inline std::vector<Eigen::VectorXd> interpolation_chain(const Eigen::VectorXd& lambda, const Eigen::VectorXd& beta,
                                                        Index fiber = 0) {
  const Index n = lambda.size();
  const Index d = beta.size();
  if (d > n) throw ValidationError("shape_mismatch", "interpolation_chain: more targets than eigenvalues", {fiber});
  for (Index j = 0; j + 1 < n; ++j) {
    if (lambda(j) < lambda(j + 1)) {
      throw ValidationError("unsorted_spectrum", "interpolation_chain: eigenvalues must be non-increasing", {fiber});
    }
  }
  const double tol = detail::interlacing_tol(n > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0);
  const Eigen::VectorXd b = detail::clip_interlacing(lambda, beta, tol, fiber);

  std::vector<Eigen::VectorXd> levels(static_cast<std::size_t>(n - d + 1));
  levels.back() = b;
  Eigen::VectorXd current = b;
  for (Index len = d; len < n; ++len) {
    Eigen::VectorXd alpha(len + 1);
    if (len == 0) {
      alpha(0) = lambda(0);
    } else {
      for (Index j = 0; j < len; ++j) alpha(j) = std::max(current(j), lambda(n - (len + 1) + j));
      alpha(len) = std::min(current(len - 1), lambda(len));
    }
    current = alpha;
    levels[static_cast<std::size_t>(n - len - 1)] = alpha;
  }
  levels.front() = lambda;
  return levels;
}

/// Rank-d orthogonal projection P with λ(P·G·P) = (β, 0_{n−d}), obtained by
/// composing Fan-Pall steps along the interpolation chain.
template <typename Scalar>
Matrix<Scalar> fan_pall_compress(const Matrix<Scalar>& g, const Eigen::VectorXd& beta, Index fiber = 0) {
  const Index n = g.rows();
  const Index d = beta.size();
  if (g.cols() != n || d > n) throw ValidationError("shape_mismatch", "fan_pall_compress: bad shapes", {fiber});
  const Eigen::VectorXd lambda = hermitian_eigenvalues<Scalar>(hermitian_part<Scalar>(g));
  const auto chain = interpolation_chain(lambda, beta, fiber);
  if (d == n) return Matrix<Scalar>::Identity(n, n);
  if (d == 0) return Matrix<Scalar>::Zero(n, n);
  Matrix<Scalar> q = Matrix<Scalar>::Identity(n, n);
  Matrix<Scalar> current = g;
  for (std::size_t level = 1; level < chain.size(); ++level) {
    const Matrix<Scalar> w = fan_pall_step<Scalar>(current, chain[level], fiber);
    q = q * w;
    current = hermitian_part<Scalar>(w.adjoint() * current * w);
  }
  return q * q.adjoint();
}

template <typename Scalar>
std::vector<Matrix<Scalar>> fan_pall_compress(const HermitianField<Scalar>& g, const RealLists& beta) {
  if (static_cast<Index>(beta.size()) != g.size()) {
    throw ValidationError("shape_mismatch", "fan_pall_compress: one target list per fiber required");
  }
  std::vector<Matrix<Scalar>> out(beta.size());
  parallel_for(g.size(), [&](Index i) { out[static_cast<std::size_t>(i)] = fan_pall_compress<Scalar>(g[i], beta[static_cast<std::size_t>(i)], i); });
  return out;
}

/// The canonical V-dual together with its own spectral analysis against V.
template <typename Scalar>
struct CanonicalDual {
  SystemField<Scalar> generators;
  FrameAnalysis<Scalar> analysis;   // eigen field of S# = S_{canonical dual}
  std::vector<Index> dims;          // d(x) = dim J_V(x)
  Index n = 0;

  const Eigen::VectorXd& lambda(Index i) const { return analysis.eigen.values[static_cast<std::size_t>(i)]; }
  const Matrix<Scalar>& vectors(Index i) const { return analysis.eigen.vectors[static_cast<std::size_t>(i)]; }
  Index d(Index i) const { return dims[static_cast<std::size_t>(i)]; }
};

template <typename Scalar>
CanonicalDual<Scalar> canonical_dual_analysis(const FrameAnalysis<Scalar>& a, const SubspaceField<Scalar>& w,
                                              const ObliquePair<Scalar>& pair) {
  CanonicalDual<Scalar> out;
  out.generators = canonical_dual(a, w, pair);
  out.analysis = analyze(out.generators, pair.V, a.rank_tol);
  out.dims = pair.V.dims();
  out.n = a.system.generator_count;
  std::vector<Index> bad;
  for (Index i = 0; i < a.size(); ++i) {
    if (out.analysis.rank[static_cast<std::size_t>(i)] != out.d(i)) bad.push_back(i);
  }
  if (!bad.empty()) {
    throw InternalError("canonical_dual_rank", "canonical dual does not span J_V(x)", std::move(bad));
  }
  return out;
}

/// A shift-generated V-dual G = G# + Z with S_G = S# + B, B = S_Z and
/// T_{G#}·T_Z* = 0.
template <typename Scalar>
struct DualDesign {
  SystemField<Scalar> G;
  HermitianField<Scalar> B;
  SystemField<Scalar> Z;
};

/// Writes a PSD B (range in J_V(x), rank ≤ n − d(x)) as Z·Z* with the rows of
/// Z* taken from the lowest-index kernel basis of the canonical dual fiber.
template <typename Scalar>
Matrix<Scalar> factor_perturbation(const Matrix<Scalar>& b, const Matrix<Scalar>& dual_fiber, Index d,
                                   double rank_tol, Index fiber) {
  const Index L = dual_fiber.rows();
  const Index n = dual_fiber.cols();
  Matrix<Scalar> z = Matrix<Scalar>::Zero(L, n);
  const double b_norm = b.size() ? spectral_norm(b) : 0.0;
  if (b_norm == 0.0) return z;
  const auto eig = hermitian_eigen<Scalar>(hermitian_part<Scalar>(b));
  const Index budget = n - d;
  const double cut = tolerance::consistency * (1.0 + b_norm);
  Index rank = 0;
  while (rank < eig.values.size() && eig.values(rank) > cut) ++rank;
  if (rank > budget) {
    throw InternalError("rank_budget", "perturbation rank " + std::to_string(rank) + " exceeds n - d(x) = " +
                                           std::to_string(budget), {fiber});
  }
  Matrix<Scalar> row_space(n, 0);
  if (d > 0) {
    Eigen::JacobiSVD<Matrix<Scalar>> svd(dual_fiber, Eigen::ComputeFullV);
    const Index r = numerical_rank(svd.singularValues(), rank_tol);
    row_space = svd.matrixV().leftCols(r);
  }
  const Matrix<Scalar> kernel = lowest_index_kernel<Scalar>(row_space, n);
  // Roundoff eigenvalues have arbitrary eigenvectors whose square-root weight
  // would leak out of J_V(x); they are dropped.
  Index kept = 0;
  while (kept < eig.values.size() && eig.values(kept) > rank_tol * b_norm) ++kept;
  const Index t = std::min<Index>(kernel.cols(), kept);
  for (Index j = 0; j < t; ++j) {
    const auto s = static_cast<RealOf<Scalar>>(std::sqrt(std::max(0.0, eig.values(j))));
    z += s * eig.vectors.col(j) * kernel.col(j).adjoint();
  }
  return z;
}

/// Builds the dual with S_G = S# + B for a prescribed PSD field B.
template <typename Scalar>
DualDesign<Scalar> design_from_perturbation(const HermitianField<Scalar>& b, const CanonicalDual<Scalar>& canon,
                                            const SubspaceField<Scalar>& v) {
  const auto& g0 = canon.generators;
  if (b.size() != g0.size() || b.dim != g0.ambient_dim) {
    throw ValidationError("shape_mismatch", "design_from_perturbation: B field has the wrong shape");
  }
  validate(b, true);
  for (Index i = 0; i < b.size(); ++i) {
    const Matrix<Scalar> outside = b[i] - v.projector(i) * b[i];
    if (outside.norm() > tolerance::membership * (1.0 + b[i].norm())) {
      throw ValidationError("outside_subspace", "perturbation range leaves J_V(x)", {i});
    }
  }
  DualDesign<Scalar> out{g0, b, SystemField<Scalar>{g0.grid, g0.ambient_dim, g0.generator_count,
                                                    std::vector<Matrix<Scalar>>(g0.fibers.size())}};
  parallel_for(b.size(), [&](Index i) {
    const auto slot = static_cast<std::size_t>(i);
    out.Z.fibers[slot] = factor_perturbation<Scalar>(b[i], g0[i], canon.d(i), canon.analysis.rank_tol, i);
    const Matrix<Scalar> residual = out.Z.fibers[slot] * out.Z.fibers[slot].adjoint() - b[i];
    if (residual.norm() > tolerance::consistency * (1.0 + b[i].norm())) {
      throw InternalError("factorization_residual", "Z·Z* does not reproduce B", {i});
    }
    out.G.fibers[slot] += out.Z.fibers[slot];
  });
  return out;
}

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Index> failing;
  std::vector<std::string> reasons;  // one entry per fiber, empty when it passes
};

/// Per fiber, with m = 2d − n: μ_i = 0 for i > d; μ_i ≥ λ#_i for i ≤ d; and
/// μ_{n−d+i} ≤ λ#_i for i ≤ m.
template <typename Scalar>
FeasibilityReport feasible_spectrum(const SpectrumField& mu, const CanonicalDual<Scalar>& canon,
                                    double slack = tolerance::spectrum_slack) {
  const Index n = canon.n;
  if (mu.size() != canon.analysis.size()) {
    throw ValidationError("shape_mismatch", "feasible_spectrum: one spectrum per fiber required");
  }
  FeasibilityReport out;
  out.reasons.resize(mu.values.size());
  for (Index x = 0; x < mu.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    const auto& m = mu.values[slot];
    const auto& lam = canon.lambda(x);
    const Index d = canon.d(x);
    std::string& why = out.reasons[slot];
    if (m.size() != n) {
      why = "spectrum length " + std::to_string(m.size()) + " differs from n";
    } else if (!m.allFinite()) {
      why = "non-finite entry";
    }
    for (Index i = 0; why.empty() && i + 1 < n; ++i) {
      if (m(i) < m(i + 1) - slack) why = "not non-increasing at slot " + std::to_string(i + 1);
    }
    for (Index i = d; why.empty() && i < n; ++i) {
      if (std::abs(m(i)) > slack) why = "slot " + std::to_string(i + 1) + " beyond d(x) is nonzero";
    }
    for (Index i = 0; why.empty() && i < d; ++i) {
      if (m(i) < lam(i) - slack) why = "slot " + std::to_string(i + 1) + " is below the canonical eigenvalue";
    }
    const Index excess = 2 * d - n;
    for (Index i = 0; why.empty() && i < excess; ++i) {
      if (m(n - d + i) > lam(i) + slack) {
        why = "slot " + std::to_string(n - d + i + 1) + " exceeds canonical eigenvalue " + std::to_string(i + 1);
      }
    }
    if (!why.empty()) out.failing.push_back(x);
  }
  out.feasible = out.failing.empty();
  return out;
}

/// Realizes a feasible spectrum field as the frame operator spectrum of a
/// shift-generated V-dual.
template <typename Scalar>
DualDesign<Scalar> realize_spectrum(const SpectrumField& mu, const CanonicalDual<Scalar>& canon,
                                    const SubspaceField<Scalar>& v) {
  const auto report = feasible_spectrum(mu, canon);
  if (!report.feasible) {
    const auto first = static_cast<std::size_t>(report.failing.front());
    throw InfeasibleError("infeasible_spectrum", "prescribed spectrum is not attainable: " + report.reasons[first],
                          report.failing);
  }
  const Index n = canon.n;
  const Index L = canon.generators.ambient_dim;
  HermitianField<Scalar> b{canon.generators.grid, L, std::vector<Matrix<Scalar>>(mu.values.size())};
  parallel_for(mu.size(), [&](Index x) {
    const auto slot = static_cast<std::size_t>(x);
    const Index d = canon.d(x);
    if (d == 0) {
      b.fibers[slot] = Matrix<Scalar>::Zero(L, L);
      return;
    }
    const Eigen::VectorXd target = mu.values[slot].head(d).cwiseMax(0.0);
    const Eigen::VectorXd lam = canon.lambda(x).head(d);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    diag.head(d) = target;
    const Matrix<Scalar> dmat = diag.cast<Scalar>().asDiagonal();
    // Compression of D_μ with spectrum λ#: M = (D^½ P D^½) restricted to the
    // first d slots, and N = D_μ − M is the complementary block.
    Matrix<Scalar> m_block;
    if (d == n) {
      m_block = dmat;
    } else {
      const Matrix<Scalar> p = fan_pall_compress<Scalar>(dmat, lam, x);
      const Matrix<Scalar> root = diag.cwiseSqrt().cast<Scalar>().asDiagonal();
      m_block = (root * p * root).topLeftCorner(d, d);
    }
    m_block = hermitian_part<Scalar>(m_block);
    const auto eig = hermitian_eigen<Scalar>(m_block);
    const Matrix<Scalar> n_block = Matrix<Scalar>(target.cast<Scalar>().asDiagonal()) - m_block;
    const Matrix<Scalar> rotated = eig.vectors.adjoint() * n_block * eig.vectors;
    const auto& vs = canon.vectors(x);
    b.fibers[slot] = hermitian_part<Scalar>(vs * rotated * vs.adjoint());
  });
  // Roundoff can leave −ε eigenvalues; project B onto the PSD cone.
  for (auto& fiber : b.fibers) {
    if (fiber.rows() == 0) continue;
    const auto eig = hermitian_eigen<Scalar>(fiber);
    fiber = eig.vectors * eig.values.cwiseMax(0.0).template cast<Scalar>().asDiagonal() * eig.vectors.adjoint();
  }
  return design_from_perturbation(b, canon, v);
}

struct TightVerdict {
  bool every_c_above_norm = false;  // n ≥ 2d(x) on every fiber
  bool feasible = false;            // for the tested c
  double tested_c = 0.0;
  double norm_sharp = 0.0;          // ‖S#‖ = max λ#₁(x)
  std::optional<double> minimal_c;
  std::vector<Index> failing;
  std::string description;
};

/// c-tight V-duals exist iff S#(x) ≤ c·P_{J_V(x)} and
/// rk(c·P_{J_V(x)} − S#(x)) ≤ min{d(x), n − d(x)} on every fiber.
template <typename Scalar>
TightVerdict tight_dual_exists(const CanonicalDual<Scalar>& canon, std::optional<double> c = std::nullopt) {
  TightVerdict out;
  const Index n = canon.n;
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    if (canon.d(x) > 0) out.norm_sharp = std::max(out.norm_sharp, canon.lambda(x)(0));
  }
  out.every_c_above_norm = true;
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    if (n < 2 * canon.d(x)) out.every_c_above_norm = false;
  }
  auto test = [&](double level) {
    std::vector<Index> bad;
    for (Index x = 0; x < canon.analysis.size(); ++x) {
      const Index d = canon.d(x);
      if (d == 0) continue;
      const auto& lam = canon.lambda(x);
      const double slack = tolerance::spectrum_slack * std::max(1.0, level);
      if (level < lam(0) - slack) {
        bad.push_back(x);
        continue;
      }
      Index rank = 0;
      for (Index j = 0; j < d; ++j) {
        if (level - lam(j) > tolerance::spectrum_slack * level) ++rank;
      }
      if (rank > std::min(d, n - d)) bad.push_back(x);
    }
    return bad;
  };
  if (c) {
    if (!std::isfinite(*c) || *c < 0.0) throw ValidationError("invalid_level", "tight level c must be >= 0");
    out.tested_c = *c;
    out.failing = test(*c);
    out.feasible = out.failing.empty();
    out.description = out.feasible ? "a c-tight V-dual exists" : "no c-tight V-dual for this c";
  } else {
    out.tested_c = out.norm_sharp;
    out.failing = test(out.norm_sharp);
    out.feasible = out.failing.empty();
    if (out.every_c_above_norm) {
      out.description = "every c >= ||S#|| admits a c-tight V-dual";
    } else if (out.feasible) {
      out.description = "only c = ||S#|| can admit a c-tight V-dual, and it does";
    } else {
      out.description = "no c-tight V-dual exists";
    }
  }
  if (out.feasible) out.minimal_c = out.norm_sharp;
  return out;
}

}  // namespace fsi
