#include "sfv/linear_solver.hpp"

#include <Eigen/SparseCholesky>

#include <string>

namespace sfv {

Vector linear_solve(const SparseMatrix& matrix, ConstVectorRef rhs, Real tol) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("linear_solve: matrix must be square");
  if (matrix.rows() != rhs.size())
    throw std::invalid_argument("linear_solve: rhs size does not match matrix");
  if (!(tol > 0)) throw std::invalid_argument("linear_solve: tol must be > 0");

  Eigen::SimplicialLDLT<SparseMatrix> factor(matrix);
  if (factor.info() != Eigen::Success)
    throw SingularSystemError("linear_solve: sparse factorization failed");

  const Vector x = factor.solve(rhs);
  if (!x.allFinite())
    throw SingularSystemError("linear_solve: solution is not finite");

  const Real residual = (matrix * x - rhs).norm();
  const Real target = tol * rhs.norm();
  if (residual > target && !(residual == 0 && rhs.norm() == 0))
    throw ConvergenceFailure("linear_solve: residual " +
                             std::to_string(residual) + " exceeds " +
                             std::to_string(target));
  return x;
}

}  // namespace sfv
