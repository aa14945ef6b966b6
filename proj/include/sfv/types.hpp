#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>

namespace sfv {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = const Eigen::Ref<const Eigen::VectorXd>&;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// 1 millidarcy in m^2.
inline constexpr Real kMilliDarcyM2 = 9.869233e-16;

inline Real millidarcy_to_m2(Real md) { return md * kMilliDarcyM2; }

/// Linear system has no unique solution (e.g. no Dirichlet constraint, or a
/// floating component disconnected from every constraint).
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver finished without meeting the requested residual tolerance.
struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sfv
