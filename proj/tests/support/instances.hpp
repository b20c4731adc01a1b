#pragma once

// Random problem instances shared by the unit suites and the acceptance run.

#include "fsi/generators.hpp"
#include "fsi/optimal_duals.hpp"
#include "fsi/rng.hpp"

#include <algorithm>
#include <cstdint>

namespace fsi::testing {

using Cx = Complex;

/// A frame F for W, a partner V with J_V ⊕ J_W⊥ = ambient, and the derived
/// objects used by most tests.
struct Instance {
  TorusGrid grid;
  Index L = 0;
  Index n = 0;
  SystemField<Cx> F;
  SubspaceField<Cx> W;
  SubspaceField<Cx> V;
  FrameAnalysis<Cx> analysis;
  ObliquePair<Cx> pair;
  CanonicalDual<Cx> canon;
};

inline Matrix<Cx> random_matrix(RandomStream& rng, Index rows, Index cols) {
  Matrix<Cx> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline Matrix<Cx> random_hermitian(RandomStream& rng, Index n) {
  const Matrix<Cx> a = random_matrix(rng, n, n);
  return (a + a.adjoint()) / 2.0;
}

inline Matrix<Cx> random_isometry(RandomStream& rng, Index rows, Index cols) {
  if (cols == 0) return Matrix<Cx>(rows, 0);
  Eigen::HouseholderQR<Matrix<Cx>> qr(random_matrix(rng, rows, cols));
  return qr.householderQ() * Matrix<Cx>::Identity(rows, cols);
}

struct InstanceOptions {
  int M = 4;
  Index L = 6;
  Index n = 4;
  Index d_min = 0;
  Index d_max = 3;
  double tilt = 0.3;      // size of the perturbation turning W into V
  bool same_v = false;
};

/// Random F with prescribed fiber ranks, W its range, V a tilted copy of W.
inline Instance make_instance(std::uint64_t seed, const InstanceOptions& opt = {}) {
  RandomStream rng(seed, 17);
  Instance inst;
  inst.grid = build_grid(1, opt.M);
  inst.L = opt.L;
  inst.n = opt.n;
  RandomGenerators spec;
  spec.count = opt.n;
  spec.seed = seed;
  spec.stream = 3;
  const Index d_hi = std::min({opt.d_max, opt.L, opt.n});
  for (Index i = 0; i < inst.grid.size(); ++i) spec.fiber_ranks.push_back(rng.integer(static_cast<int>(opt.d_min), static_cast<int>(d_hi)));
  inst.F = ingest_generators<Cx>(inst.grid, opt.L, spec);
  inst.W = subspace_from_system(inst.F);
  if (opt.same_v) {
    inst.V = inst.W;
  } else {
    std::vector<Matrix<Cx>> spans;
    for (Index i = 0; i < inst.grid.size(); ++i) {
      spans.push_back(inst.W[i] + opt.tilt * random_matrix(rng, opt.L, inst.W.dim(i)));
    }
    inst.V = orthonormalize(inst.grid, opt.L, spans);
  }
  inst.analysis = analyze(inst.F, inst.W);
  inst.pair = check_oblique_sum(inst.V, inst.W);
  inst.canon = canonical_dual_analysis(inst.analysis, inst.W, inst.pair);
  return inst;
}

/// Feasible spectrum: each slot sampled between its bounds, then sorted.
inline SpectrumField random_feasible_mu(RandomStream& rng, const CanonicalDual<Cx>& canon, double spread = 1.0) {
  const Index n = canon.n;
  SpectrumField mu{canon.analysis.eigen.grid, n, RealLists(canon.dims.size())};
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    const Index d = canon.d(x);
    const auto& lam = canon.lambda(x);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
    for (Index i = 0; i < d; ++i) {
      double hi = lam(i) + spread * rng.uniform() * (1.0 + lam(0));
      if (i >= n - d) hi = std::min(hi, lam(i - (n - d)));
      m(i) = lam(i) + rng.uniform() * (hi - lam(i));
    }
    std::sort(m.data(), m.data() + n, std::greater<double>());
    mu.values[static_cast<std::size_t>(x)] = m;
  }
  return mu;
}

/// A spectrum violating one of the feasibility conditions on one fiber.
inline SpectrumField random_infeasible_mu(RandomStream& rng, const CanonicalDual<Cx>& canon) {
  SpectrumField mu = random_feasible_mu(rng, canon);
  std::vector<Index> spec;
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    if (canon.d(x) > 0) spec.push_back(x);
  }
  const Index x = spec.empty() ? 0 : spec[static_cast<std::size_t>(rng.integer(0, static_cast<int>(spec.size()) - 1))];
  auto& m = mu.values[static_cast<std::size_t>(x)];
  const Index d = canon.d(x);
  const Index n = canon.n;
  const auto& lam = canon.lambda(x);
  const double delta = 0.05 + 0.5 * rng.uniform();
  std::vector<int> kinds;
  if (d > 0) kinds.push_back(0);
  if (2 * d - n >= 1) kinds.push_back(1);
  if (d < n) kinds.push_back(2);
  const int kind = kinds[static_cast<std::size_t>(rng.integer(0, static_cast<int>(kinds.size()) - 1))];
  if (kind == 0) {
    m(d - 1) = lam(d - 1) - delta * (1.0 + lam(d - 1));
    if (m(d - 1) < 0.0) m(d - 1) = -delta;
  } else if (kind == 1) {
    const Index k = rng.integer(0, static_cast<int>(2 * d - n) - 1);
    m(n - d + k) = lam(k) + delta * (1.0 + lam(k));
    for (Index i = 0; i < n - d + k; ++i) m(i) = std::max(m(i), m(n - d + k));
  } else {
    m(d) = delta;
  }
  return mu;
}

/// Feasible competitor spectrum whose total trace integral is at least w.
inline SpectrumField competitor_mu(RandomStream& rng, const CanonicalDual<Cx>& canon, double w) {
  SpectrumField mu = random_feasible_mu(rng, canon, rng.uniform(0.0, 1.5));
  const double weight = canon.analysis.eigen.grid.weight();
  double total = 0.0;
  for (const auto& m : mu.values) total += m.sum() * weight;
  if (total >= w) return mu;
  // Slot 1 has no upper bound on fibers with 0 < d < n.
  std::vector<std::size_t> open;
  for (Index x = 0; x < canon.analysis.size(); ++x) {
    if (canon.d(x) > 0 && canon.d(x) < canon.n) open.push_back(static_cast<std::size_t>(x));
  }
  if (open.empty()) return mu;
  std::vector<double> share(open.size());
  double share_total = 0.0;
  for (auto& s : share) share_total += (s = 0.05 + rng.uniform());
  const double missing = (w - total) * (1.0 + 0.3 * rng.uniform());
  for (std::size_t k = 0; k < open.size(); ++k) {
    mu.values[open[k]](0) += missing * share[k] / share_total / weight;
  }
  return mu;
}

}  // namespace fsi::testing
