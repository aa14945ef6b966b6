#pragma once

#include "sfv/types.hpp"

namespace sfv {

/// Solves the sparse symmetric system A x = b to ||Ax - b|| <= tol*||b||.
/// Throws SingularSystemError when the factorization breaks down and
/// ConvergenceFailure when the residual target is not met.
Vector linear_solve(const SparseMatrix& matrix, ConstVectorRef rhs,
                    Real tol = 1e-10);

}  // namespace sfv
