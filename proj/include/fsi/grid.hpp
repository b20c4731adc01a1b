#pragma once

#include "fsi/core.hpp"

#include <vector>

namespace fsi {

class TorusGrid;

inline constexpr Index default_fiber_budget = Index{1} << 20;

/// Builds the M^k-point grid. Throws ResourceError when M^k exceeds `budget`.
TorusGrid build_grid(int k, int M, Index budget = default_fiber_budget);

/// Uniform quadrature model of the torus [−1/2, 1/2)^k.
///
/// Fibers sit at −1/2 + m/M for m ∈ {0, …, M−1}^k and are ordered
/// lexicographically in the multi-index m (first axis most significant).
/// Every fiber carries weight 1/M^k.
class TorusGrid {
 public:
  TorusGrid() = default;

  int dimension() const noexcept { return dimension_; }
  int points_per_axis() const noexcept { return points_per_axis_; }
  Index size() const noexcept { return size_; }
  double weight() const noexcept { return 1.0 / static_cast<double>(size_); }

  std::vector<int> multi_index(Index fiber) const;
  Eigen::VectorXd point(Index fiber) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  friend TorusGrid build_grid(int, int, Index);
  TorusGrid(int dimension, int points_per_axis, Index size)
      : dimension_(dimension), points_per_axis_(points_per_axis), size_(size) {}

  int dimension_ = 1;
  int points_per_axis_ = 1;
  Index size_ = 1;
};

}  // namespace fsi
