#pragma once

#include <vector>

#include "povmkit/errors.hpp"
#include "povmkit/types.hpp"

namespace povmkit {

// Hilbert-Schmidt inner product Tr[A^dag B], antilinear in the first slot.
Complex hs_inner(const Matrix& a, const Matrix& b);

// Hilbert-Schmidt (Frobenius) norm.
double hs_norm(const Matrix& a);

// Flatten a square operator into a column vector, row-major: entry (m, n)
// lands at index m*d + n. The inverse of devectorize().
Vector vectorize(const Matrix& a);

// Reshape a length d^2 vector back into a d x d operator.
Matrix devectorize(const Vector& v);

// Default rank cutoff used by every truncated SVD in the library:
// max(rows, cols) * machine eps * largest singular value.
double svd_rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max);

// Moore-Penrose pseudoinverse via SVD. Singular values at or below the
// rank tolerance are treated as zero. rank_tol <= 0 selects the default
// tolerance above.
Matrix moore_penrose(const Matrix& z, double rank_tol = 0.0);

// Orthogonal projector (in vectorized form, d^2 x d^2) onto the complex
// linear span of the given operators.
Matrix span_projector(const std::vector<Matrix>& ops);

// True when ||A - A^dag|| <= tol in Hilbert-Schmidt norm.
bool is_hermitian(const Matrix& a, double tol = 1e-10);

// Smallest eigenvalue of the Hermitian part (A + A^dag)/2. Used for
// positive-semidefiniteness checks.
double min_eigenvalue(const Matrix& a);

} // namespace povmkit
