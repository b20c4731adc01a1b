#include <doctest.h>

#include "support/instances.hpp"

#include "fsi/spectral_design.hpp"

using namespace fsi;
using fsi::testing::Cx;
using doctest::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix<Cx> diag(std::initializer_list<double> v) { return vec(v).cast<Cx>().asDiagonal(); }

/// Nonzero spectrum of W*GW, padded with the zeros of P·G·P where relevant.
Eigen::VectorXd compressed(const Matrix<Cx>& g, const Matrix<Cx>& w) {
  return hermitian_eigenvalues<Cx>(hermitian_part<Cx>(Matrix<Cx>(w.adjoint() * g * w)));
}

/// Interlacing targets λ_j ≥ β_j ≥ λ_{n−d+j}, with a chance of hitting the
/// endpoints exactly.
Eigen::VectorXd random_targets(fsi::RandomStream& rng, const Eigen::VectorXd& lam, Index d) {
  const Index n = lam.size();
  Eigen::VectorXd beta(d);
  for (Index j = 0; j < d; ++j) {
    const double u = rng.uniform();
    const double t = u < 0.15 ? 0.0 : (u > 0.85 ? 1.0 : rng.uniform());
    beta(j) = lam(n - d + j) + t * (lam(j) - lam(n - d + j));
  }
  std::sort(beta.data(), beta.data() + d, std::greater<double>());
  return beta;
}

}  // namespace

TEST_CASE("fan_pall_step examples") {
  auto w = fan_pall_step<Cx>(diag({3.0, 1.0}), vec({2.0}));
  CHECK(w.rows() == 2);
  CHECK(w.cols() == 1);
  CHECK(std::abs(w(0, 0)) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(w(1, 0)) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(compressed(diag({3.0, 1.0}), w)(0) == Approx(2.0));

  w = fan_pall_step<Cx>(diag({3.0, 1.0}), vec({1.0}));
  CHECK(std::abs(w(1, 0)) == Approx(1.0));
  CHECK(std::abs(w(0, 0)) == Approx(0.0));

  w = fan_pall_step<Cx>(diag({2.0, 2.0}), vec({2.0}));
  CHECK(compressed(diag({2.0, 2.0}), w)(0) == Approx(2.0));

  try {
    (void)fan_pall_step<Cx>(diag({3.0, 1.0}), vec({3.5}), 7);
    FAIL("expected interlacing violation");
  } catch (const ValidationError& e) {
    CHECK(e.code() == "interlacing_violation");
    CHECK(e.fibers() == std::vector<Index>{7});
  }
}

TEST_CASE("interpolation chain") {
  const auto chain = interpolation_chain(vec({5.0, 3.0, 1.0}), vec({2.0}));
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == vec({5.0, 3.0, 1.0}));
  CHECK(chain[1] == vec({3.0, 2.0}));
  CHECK(chain[2] == vec({2.0}));

  const auto base = interpolation_chain(vec({4.0, 2.0, 1.0}), vec({3.0, 1.5}));
  REQUIRE(base.size() == 2);
  CHECK(base[1] == vec({3.0, 1.5}));

  fsi::RandomStream rng(2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = rng.integer(1, 8);
    const Index d = rng.integer(0, static_cast<int>(n));
    Eigen::VectorXd lam(n);
    for (Index j = 0; j < n; ++j) lam(j) = rng.uniform(0.0, 10.0);
    if (rng.uniform() < 0.3 && n > 1) lam(1) = lam(0);
    std::sort(lam.data(), lam.data() + n, std::greater<double>());
    Eigen::VectorXd beta = d == n ? lam : random_targets(rng, lam, d);
    if (rng.uniform() < 0.2 && d < n) beta = lam.segment(1, d);
    const auto levels = interpolation_chain(lam, beta);
    REQUIRE(static_cast<Index>(levels.size()) == n - d + 1);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      const auto& up = levels[i];
      const auto& down = levels[i + 1];
      REQUIRE(down.size() == up.size() - 1);
      for (Index j = 0; j < down.size(); ++j) {
        CHECK(up(j) >= down(j) - 1e-12);
        CHECK(down(j) >= up(j + 1) - 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(interpolation_chain(vec({3.0, 1.0}), vec({0.5})), ValidationError);
}

TEST_CASE("fan_pall_compress examples") {
  auto p = fan_pall_compress<Cx>(diag({3.0, 2.0, 1.0}), vec({2.0}));
  CHECK(std::abs(p.trace().real() - 1.0) < 1e-12);
  CHECK((p * p - p).norm() < 1e-12);
  const Eigen::VectorXd spec = compressed(diag({3.0, 2.0, 1.0}), p);
  CHECK(spec(0) == Approx(2.0));
  CHECK(std::abs(spec(1)) < 1e-12);

  const Matrix<Cx> g = diag({4.0, 3.0, 1.0});
  p = fan_pall_compress<Cx>(g, vec({4.0, 3.0}));
  CHECK((p - diag({1.0, 1.0, 0.0})).norm() < 1e-12);

  p = fan_pall_compress<Cx>(g, vec({4.0, 3.0, 1.0}));
  CHECK(p == Matrix<Cx>::Identity(3, 3));
  CHECK_THROWS_AS(fan_pall_compress<Cx>(g, vec({4.0, 3.0, 0.5})), ValidationError);
}

TEST_CASE("fan-pall soundness on random Hermitian matrices") {
  fsi::RandomStream rng(31, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = rng.integer(1, 7);
    Matrix<Cx> g = fsi::testing::random_hermitian(rng, n);
    if (rng.uniform() < 0.3 && n > 2) {
      // Repeated eigenvalue.
      const auto e = hermitian_eigen<Cx>(g);
      Eigen::VectorXd lam = e.values;
      lam(1) = lam(0);
      g = e.vectors * lam.cast<Cx>().asDiagonal() * e.vectors.adjoint();
    }
    const Eigen::VectorXd lam = hermitian_eigenvalues<Cx>(g);
    const double scale = 1.0 + lam.cwiseAbs().maxCoeff();

    const Eigen::VectorXd beta = random_targets(rng, lam, n - 1);
    const Matrix<Cx> w = fan_pall_step<Cx>(g, beta);
    CHECK((w.adjoint() * w - Matrix<Cx>::Identity(n - 1, n - 1)).norm() <= 1e-8);
    if (n > 1) CHECK((compressed(g, w) - beta).cwiseAbs().maxCoeff() <= 1e-8 * scale);

    const Index d = rng.integer(0, static_cast<int>(n));
    const Eigen::VectorXd b = d == n ? lam : random_targets(rng, lam, d);
    const Matrix<Cx> p = fan_pall_compress<Cx>(g, b);
    CHECK((p * p - p).norm() <= 1e-8);
    CHECK((p - p.adjoint()).norm() <= 1e-8);
    CHECK(std::abs(p.trace().real() - static_cast<double>(d)) <= 1e-8);
    Eigen::VectorXd got = hermitian_eigenvalues<Cx>(hermitian_part<Cx>(Matrix<Cx>(p * g * p)));
    // Sort the expected list (β, 0_{n−d}) to compare against the full spectrum.
    Eigen::VectorXd want = Eigen::VectorXd::Zero(n);
    want.head(d) = b;
    std::sort(want.data(), want.data() + n, std::greater<double>());
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-8 * scale);
  }
}

TEST_CASE("secular weights sum to one on strict fibers") {
  fsi::RandomStream rng(4, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 6);
    Eigen::VectorXd lam(n);
    for (Index j = 0; j < n; ++j) lam(j) = static_cast<double>(n - j) + 0.5 * rng.uniform();
    Eigen::VectorXd beta(n - 1);
    for (Index j = 0; j + 1 < n; ++j) beta(j) = lam(j + 1) + rng.uniform(0.1, 0.9) * (lam(j) - lam(j + 1));
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      double num = 1.0, den = 1.0;
      for (Index i = 0; i + 1 < n; ++i) num *= lam(j) - beta(i);
      for (Index k = 0; k < n; ++k) {
        if (k != j) den *= lam(j) - lam(k);
      }
      sum += num / den;
    }
    CHECK(sum == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("Cauchy interlacing for random projections") {
  fsi::RandomStream rng(6, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 7);
    const Index d = rng.integer(1, static_cast<int>(n) - 1);
    const Matrix<Cx> g = fsi::testing::random_hermitian(rng, n);
    const Matrix<Cx> q = fsi::testing::random_isometry(rng, n, d);
    const Eigen::VectorXd lam = hermitian_eigenvalues<Cx>(g);
    const Eigen::VectorXd beta = compressed(g, q);
    for (Index j = 0; j < d; ++j) {
      CHECK(lam(j) >= beta(j) - 1e-10);
      CHECK(beta(j) >= lam(n - d + j) - 1e-10);
    }
  }
}

TEST_CASE("feasible_spectrum examples") {
  // Single fiber with n = 3, d = 2 and λ# = (4, 1).
  const auto g = build_grid(1, 1);
  CanonicalDual<Cx> canon;
  canon.n = 3;
  canon.dims = {2};
  canon.analysis.eigen = EigenField<Cx>{g, 3, {vec({4.0, 1.0, 0.0})}, {Matrix<Cx>::Identity(4, 2)}};
  canon.analysis.rank = {2};
  canon.analysis.system.grid = g;
  canon.analysis.system.fibers.resize(1);
  auto mu = [&](Eigen::VectorXd v) { return SpectrumField{g, 3, {v}}; };
  CHECK(feasible_spectrum(mu(vec({4.0, 1.0, 0.0})), canon).feasible);
  CHECK(feasible_spectrum(mu(vec({5.0, 3.0, 0.0})), canon).feasible);
  const auto bad = feasible_spectrum(mu(vec({5.0, 4.5, 0.0})), canon);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.failing == std::vector<Index>{0});
  CHECK_FALSE(feasible_spectrum(mu(vec({3.9, 1.0, 0.0})), canon).feasible);
  CHECK_FALSE(feasible_spectrum(mu(vec({4.0, 1.0, 0.5})), canon).feasible);
}

TEST_CASE("realize_spectrum round trips") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto inst = fsi::testing::make_instance(seed, {4, 6, 5, 0, 5, 0.3});
    fsi::RandomStream rng(seed, 9);

    // μ = λ# reproduces the canonical dual.
    SpectrumField same{inst.grid, inst.n, inst.canon.analysis.eigen.values};
    const auto trivial = realize_spectrum(same, inst.canon, inst.V);
    for (Index i = 0; i < inst.grid.size(); ++i) CHECK(trivial.Z[i].norm() <= 1e-8);

    const auto mu = fsi::testing::random_feasible_mu(rng, inst.canon);
    const auto design = realize_spectrum(mu, inst.canon, inst.V);
    CHECK(verify_duality(inst.F, design.G, inst.pair).holds);
    const auto again = analyze(design.G, inst.V);
    for (Index i = 0; i < inst.grid.size(); ++i) {
      const auto slot = static_cast<std::size_t>(i);
      CHECK((again.eigen.values[slot] - mu.values[slot]).cwiseAbs().maxCoeff() <= 1e-8);
      // Structure of the additive part.
      CHECK((design.Z[i] * design.Z[i].adjoint() - design.B[i]).norm() <= 1e-8);
      CHECK((inst.canon.generators[i] * design.Z[i].adjoint()).norm() <= 1e-8);
      CHECK(numerical_rank(singular_values<Cx>(design.B[i]), 1e-8) <= inst.n - inst.V.dim(i));
    }

    const auto wrong = fsi::testing::random_infeasible_mu(rng, inst.canon);
    CHECK_FALSE(feasible_spectrum(wrong, inst.canon).feasible);
    CHECK_THROWS_AS(realize_spectrum(wrong, inst.canon, inst.V), InfeasibleError);
  }
}

TEST_CASE("random admissible perturbations factor into duals") {
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    const auto inst = fsi::testing::make_instance(seed, {4, 6, 5, 0, 5, 0.3});
    fsi::RandomStream rng(seed, 5);
    HermitianField<Cx> b{inst.grid, inst.L, {}};
    for (Index i = 0; i < inst.grid.size(); ++i) {
      const Index d = inst.V.dim(i);
      const Index t = std::min(d, inst.n - d);
      const Matrix<Cx> h = fsi::testing::random_matrix(rng, d, t);
      b.fibers.push_back(inst.V[i] * h * h.adjoint() * inst.V[i].adjoint());
    }
    const auto design = design_from_perturbation(b, inst.canon, inst.V);
    CHECK(verify_duality(inst.F, design.G, inst.pair).holds);
    for (Index i = 0; i < inst.grid.size(); ++i) {
      CHECK((design.G[i] * design.Z[i].adjoint() - design.B[i]).norm() <= 1e-8);
      const Matrix<Cx> s_g = design.G[i] * design.G[i].adjoint();
      CHECK((s_g - inst.canon.analysis.frame_op[i] - b[i]).norm() <= 1e-8);
    }
  }
}

TEST_CASE("tight dual verdicts") {
  const auto g = build_grid(1, 2);
  auto canon_with = [&](Index n, Index d, Eigen::VectorXd lam) {
    CanonicalDual<Cx> c;
    c.n = n;
    c.dims = {d, d};
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
    padded.head(lam.size()) = lam;
    c.analysis.eigen = EigenField<Cx>{g, n, {padded, padded}, {}};
    c.analysis.rank = {d, d};
    c.analysis.system.grid = g;
    c.analysis.system.fibers.resize(2);
    return c;
  };
  auto v = tight_dual_exists(canon_with(4, 2, vec({4.0, 1.0})));
  CHECK(v.every_c_above_norm);
  CHECK(v.minimal_c.value() == Approx(4.0));

  const auto odd = canon_with(3, 2, vec({4.0, 1.0}));
  v = tight_dual_exists(odd, 4.0);
  CHECK(v.feasible);
  v = tight_dual_exists(odd, 5.0);
  CHECK_FALSE(v.feasible);
  v = tight_dual_exists(odd, 3.0);
  CHECK_FALSE(v.feasible);
  v = tight_dual_exists(odd);
  CHECK_FALSE(v.every_c_above_norm);
  CHECK(v.feasible);
  CHECK(v.tested_c == Approx(4.0));

  const auto stuck = canon_with(3, 3, vec({4.0, 2.0, 1.0}));
  v = tight_dual_exists(stuck);
  CHECK_FALSE(v.feasible);
  CHECK_FALSE(v.minimal_c.has_value());
}

TEST_CASE("realized tight duals") {
  const auto inst = fsi::testing::make_instance(12, {4, 6, 6, 1, 3, 0.3});
  const auto verdict = tight_dual_exists(inst.canon);
  REQUIRE(verdict.every_c_above_norm);
  const double c = verdict.norm_sharp * 1.3;
  SpectrumField mu{inst.grid, inst.n, {}};
  for (Index i = 0; i < inst.grid.size(); ++i) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(inst.n);
    m.head(inst.V.dim(i)).setConstant(c);
    mu.values.push_back(m);
  }
  const auto design = realize_spectrum(mu, inst.canon, inst.V);
  for (Index i = 0; i < inst.grid.size(); ++i) {
    const Matrix<Cx> s_g = design.G[i] * design.G[i].adjoint();
    CHECK((s_g - c * inst.V.projector(i)).norm() <= 1e-8);
  }
}
