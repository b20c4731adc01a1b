#pragma once

#include "fsi/fields.hpp"
#include "fsi/parallel.hpp"
#include "fsi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>

namespace fsi {

/// Per-fiber matrices supplied verbatim.
struct ExplicitGenerators {
  std::vector<Matrix<Complex>> fibers;
};

enum class ProfileKind { geometric, gaussian, cauchy };

/// A decaying profile ĥ evaluated at t = x + ℓ − shift:
///   geometric  amplitude · rate^(−‖t‖₁)
///   gaussian   amplitude · exp(−‖t‖² / (2·width²))
///   cauchy     amplitude / (1 + ‖t‖² / width²)
struct AnalyticProfile {
  ProfileKind kind = ProfileKind::geometric;
  double parameter = 2.0;  // rate for geometric, width otherwise
  double amplitude = 1.0;
  Eigen::VectorXd shift;   // empty means zero

  double operator()(const Eigen::VectorXd& t) const;
};

/// One column per profile.
struct AnalyticGenerators {
  std::vector<AnalyticProfile> profiles;
};

/// Seeded Gaussian generators. With `rank` (or per-fiber `fiber_ranks`) the
/// fiber matrices are products A·C of Gaussian factors with that inner size,
/// so d(x) can be prescribed.
struct RandomGenerators {
  Index count = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::optional<Index> rank;
  std::vector<Index> fiber_ranks;
  double scale = 1.0;
};

using GeneratorSpec = std::variant<ExplicitGenerators, AnalyticGenerators, RandomGenerators>;

/// The L retained lattice offsets of ℤ^k: the L points closest to the origin
/// (ties broken lexicographically), listed in lexicographic order.
inline std::vector<Eigen::VectorXi> lattice_offsets(int k, Index L);

inline double AnalyticProfile::operator()(const Eigen::VectorXd& t_in) const {
  const Eigen::VectorXd t = shift.size() == 0 ? t_in : Eigen::VectorXd(t_in - shift);
  switch (kind) {
    case ProfileKind::geometric:
      return amplitude * std::pow(parameter, -t.lpNorm<1>());
    case ProfileKind::gaussian:
      return amplitude * std::exp(-t.squaredNorm() / (2.0 * parameter * parameter));
    case ProfileKind::cauchy:
      return amplitude / (1.0 + t.squaredNorm() / (parameter * parameter));
  }
  return 0.0;
}

inline std::vector<Eigen::VectorXi> lattice_offsets(int k, Index L) {
  if (k < 1 || L < 1) throw ValidationError("invalid_truncation", "need k >= 1 and L >= 1");
  int radius = 0;
  auto cube = [k](int r) {
    double count = 1;
    for (int i = 0; i < k; ++i) count *= 2 * r + 1;
    return count;
  };
  while (cube(radius) < static_cast<double>(L)) ++radius;

  std::vector<Eigen::VectorXi> points;
  Eigen::VectorXi p = Eigen::VectorXi::Constant(k, -radius);
  while (true) {
    points.push_back(p);
    int axis = k - 1;
    while (axis >= 0 && p(axis) == radius) p(axis--) = -radius;
    if (axis < 0) break;
    ++p(axis);
  }
  auto lex_less = [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::stable_sort(points.begin(), points.end(), [&](const auto& a, const auto& b) {
    const int na = a.squaredNorm(), nb = b.squaredNorm();
    return na != nb ? na < nb : lex_less(a, b);
  });
  points.resize(static_cast<std::size_t>(L));
  std::sort(points.begin(), points.end(), lex_less);
  return points;
}

namespace detail {

template <typename Scalar>
Scalar gaussian_entry(const Philox4x32& gen, std::uint64_t counter) {
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    return gen.complex_normal(counter);
  } else {
    return gen.normal_pair(counter)[0];
  }
}

template <typename Scalar>
Matrix<Scalar> gaussian_matrix(const Philox4x32& gen, std::uint64_t block, Index rows, Index cols) {
  Matrix<Scalar> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      m(i, j) = gaussian_entry<Scalar>(gen, (block << 32) + static_cast<std::uint64_t>(j * rows + i));
  return m;
}

}  // namespace detail

/// Builds a SystemField in fiber coordinates from a generator description.
template <typename Scalar = Complex>
SystemField<Scalar> ingest_generators(const TorusGrid& grid, Index L, const GeneratorSpec& spec) {
  if (L < 1) throw ValidationError("invalid_truncation", "ambient dimension L must be >= 1");
  SystemField<Scalar> out{grid, L, 0, {}};

  if (const auto* ex = std::get_if<ExplicitGenerators>(&spec)) {
    if (static_cast<Index>(ex->fibers.size()) != grid.size()) {
      throw ValidationError("shape_mismatch", "explicit generators: expected " +
                                                  std::to_string(grid.size()) + " fibers, got " +
                                                  std::to_string(ex->fibers.size()));
    }
    out.generator_count = ex->fibers.empty() ? 0 : ex->fibers.front().cols();
    for (Index i = 0; i < grid.size(); ++i) {
      const auto& m = ex->fibers[static_cast<std::size_t>(i)];
      if (m.rows() != L || m.cols() != out.generator_count) {
        throw ValidationError("shape_mismatch", "explicit generators: fiber matrix shape differs", {i});
      }
      if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
        out.fibers.push_back(m.template cast<Scalar>());
      } else {
        if (m.imag().cwiseAbs().maxCoeff() > 0.0) {
          throw ValidationError("complex_entry", "real field requested for complex generators", {i});
        }
        out.fibers.push_back(m.real().template cast<Scalar>());
      }
    }
  } else if (const auto* an = std::get_if<AnalyticGenerators>(&spec)) {
    if (an->profiles.empty()) throw ValidationError("shape_mismatch", "analytic generators: no profiles");
    const auto offsets = lattice_offsets(grid.dimension(), L);
    out.generator_count = static_cast<Index>(an->profiles.size());
    out.fibers.resize(static_cast<std::size_t>(grid.size()));
    for (Index i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd x = grid.point(i);
      Matrix<Scalar> m(L, out.generator_count);
      for (Index j = 0; j < out.generator_count; ++j) {
        const auto& profile = an->profiles[static_cast<std::size_t>(j)];
        if (profile.shift.size() != 0 && profile.shift.size() != grid.dimension()) {
          throw ValidationError("shape_mismatch", "analytic profile shift has the wrong dimension");
        }
        for (Index r = 0; r < L; ++r) {
          m(r, j) = Scalar(profile(x + offsets[static_cast<std::size_t>(r)].cast<double>()));
        }
      }
      out[i] = std::move(m);
    }
  } else {
    const auto& rnd = std::get<RandomGenerators>(spec);
    if (rnd.count < 1) throw ValidationError("shape_mismatch", "random generators: count must be >= 1");
    if (!rnd.fiber_ranks.empty() && static_cast<Index>(rnd.fiber_ranks.size()) != grid.size()) {
      throw ValidationError("shape_mismatch", "random generators: fiber_ranks length differs from grid");
    }
    const Index full = std::min(L, rnd.count);
    out.generator_count = rnd.count;
    out.fibers.resize(static_cast<std::size_t>(grid.size()));
    const Philox4x32 gen(rnd.seed, rnd.stream);
    for (Index i = 0; i < grid.size(); ++i) {
      Index r = rnd.fiber_ranks.empty() ? rnd.rank.value_or(full) : rnd.fiber_ranks[static_cast<std::size_t>(i)];
      if (r < 0 || r > full) throw ValidationError("invalid_rank", "random generators: rank out of range", {i});
      const auto fiber = static_cast<std::uint64_t>(i);
      Matrix<Scalar> m;
      if (r == full) {
        m = detail::gaussian_matrix<Scalar>(gen, 3 * fiber, L, rnd.count);
      } else if (r == 0) {
        m = Matrix<Scalar>::Zero(L, rnd.count);
      } else {
        m = detail::gaussian_matrix<Scalar>(gen, 3 * fiber + 1, L, r) *
            detail::gaussian_matrix<Scalar>(gen, 3 * fiber + 2, r, rnd.count) /
            static_cast<RealOf<Scalar>>(std::sqrt(static_cast<double>(r)));
      }
      out[i] = static_cast<RealOf<Scalar>>(rnd.scale) * m;
    }
  }
  validate(out);
  return out;
}

}  // namespace fsi
