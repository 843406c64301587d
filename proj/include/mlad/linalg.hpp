#pragma once

#include "mlad/tensor.hpp"

namespace mlad {

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws NumericError when a pivot is not strictly positive.
Tensor cholesky(const Tensor& a);

// Solves A X = B in place given the Cholesky factor L of A. B is n x m
// row-major and is overwritten with X.
void chol_solve_inplace(const Tensor& l, double* b, int m);

Tensor chol_solve(const Tensor& l, const Tensor& b);

// log|A| from the factor diagonal.
double chol_logdet(const Tensor& l);

// A^{-1} from the factor (solve against the identity).
Tensor chol_inverse(const Tensor& l);

} // namespace mlad
