#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace fsi {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

/// Per-fiber real sequences (eigenvalue lists, spectra, local traces).
using RealLists = std::vector<Eigen::VectorXd>;

namespace tolerance {
inline constexpr double rank = 1e-10;          // relative singular-value cut
inline constexpr double hermitian = 1e-12;     // ‖A − A*‖ ≤ tol·(1 + ‖A‖)
inline constexpr double psd = 1e-10;           // λ_min ≥ −tol·‖A‖
inline constexpr double orthonormal = 1e-10;   // ‖B*B − I‖
inline constexpr double membership = 1e-8;     // generators inside a range function
inline constexpr double eigen_clamp = 1e-12;   // eigenvalues below tol·λ₁ become 0
inline constexpr double oblique_condition = 1e12;
inline constexpr double consistency = 1e-8;    // internal cross-checks
inline constexpr double duality = 1e-8;
inline constexpr double interlacing = 1e-10;   // scaled by (1 + ‖G‖)
inline constexpr double spectrum_slack = 1e-10;
inline constexpr double integral = 1e-9;       // comparisons of integrals
}  // namespace tolerance

}  // namespace fsi
