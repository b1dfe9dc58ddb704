#pragma once

#include "evogo/matrix.hpp"

namespace evogo::linalg {

struct CholeskyResult {
    Matrix L;       // lower triangular
    double jitter;  // diagonal shift actually applied
};

/// Factor A + jitter*I = L*L^T for symmetric positive definite A.
/// If the factorization fails at the requested jitter, the jitter is
/// escalated geometrically (x10, starting at 1e-10 * mean diagonal) until it
/// succeeds or the cap 1e-2 * max(1, mean diagonal) is exceeded, at which
/// point NotPositiveDefinite is thrown. Non-square input throws
/// DimensionMismatch; asymmetry beyond 1e-10 relative throws InvalidArgument.
CholeskyResult cholesky_factor(const Matrix& a, double jitter = 0.0);

// B <- L^{-1} B and B <- L^{-T} B, column by column (columns independent).
void solve_lower_inplace(const Matrix& l, Matrix& b);
void solve_lower_transpose_inplace(const Matrix& l, Matrix& b);

// Solve (L L^T) x = y.
Vector solve_spd(const Matrix& l, const Vector& y);

/// Eigendecomposition of a small symmetric matrix by the cyclic Jacobi
/// method: A = V diag(w) V^T with V's columns the eigenvectors.
void symmetric_eigen(const Matrix& a, Matrix& eigvecs, Vector& eigvals);

}  // namespace evogo::linalg
