#include "fsi/grid.hpp"

#include "fsi/errors.hpp"

#include <string>

namespace fsi {

TorusGrid build_grid(int k, int M, Index budget) {
  if (k < 1) throw ValidationError("invalid_grid", "lattice dimension k must be >= 1");
  if (M < 1) throw ValidationError("invalid_grid", "points per axis M must be >= 1");
  Index size = 1;
  for (int axis = 0; axis < k; ++axis) {
    if (size > budget / M) {
      throw ResourceError("fiber_budget_exceeded",
                          "grid with M=" + std::to_string(M) + ", k=" + std::to_string(k) +
                              " exceeds the fiber budget of " + std::to_string(budget));
    }
    size *= M;
  }
  if (size > budget) {
    throw ResourceError("fiber_budget_exceeded",
                        "grid size " + std::to_string(size) + " exceeds the fiber budget");
  }
  return TorusGrid(k, M, size);
}

std::vector<int> TorusGrid::multi_index(Index fiber) const {
  std::vector<int> m(static_cast<std::size_t>(dimension_));
  for (int axis = dimension_ - 1; axis >= 0; --axis) {
    m[static_cast<std::size_t>(axis)] = static_cast<int>(fiber % points_per_axis_);
    fiber /= points_per_axis_;
  }
  return m;
}

Eigen::VectorXd TorusGrid::point(Index fiber) const {
  const auto m = multi_index(fiber);
  Eigen::VectorXd x(dimension_);
  for (int axis = 0; axis < dimension_; ++axis) {
    x(axis) = -0.5 + static_cast<double>(m[static_cast<std::size_t>(axis)]) /
                         static_cast<double>(points_per_axis_);
  }
  return x;
}

}  // namespace fsi
