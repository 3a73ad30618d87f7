#pragma once

#include <optional>
#include <vector>

#include "poppkit/matrix.hpp"

namespace poppkit {

// ---- exact ----------------------------------------------------------------

/// Rank by fraction-free (Bareiss) elimination after clearing row
/// denominators. No tolerance is involved.
std::size_t rank(const RationalMatrix& m);

Rational determinant(const RationalMatrix& m);

/// Exact Gauss-Jordan inverse. Throws NumericalError if singular.
RationalMatrix inverse(const RationalMatrix& m);

bool is_symmetric(const RationalMatrix& m);

/// Sylvester's criterion: symmetric with all leading principal minors > 0.
bool is_positive_definite(const RationalMatrix& m);

// ---- floating point -------------------------------------------------------

/// LU with partial pivoting.
double determinant(const RealMatrix& m);
RealMatrix inverse(const RealMatrix& m);

/// Lower-triangular L with m = L L^T, or nullopt when m is not SPD.
std::optional<RealMatrix> try_cholesky(const RealMatrix& m);
RealMatrix cholesky(const RealMatrix& m);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// increasingly. Iterates until the off-diagonal Frobenius norm is at most
/// 1e-13 times the Frobenius norm of the input.
std::vector<double> symmetric_eigenvalues(const RealMatrix& a);

/// Eigenvalues of g^{-1} h for SPD g and symmetric h, sorted increasingly.
/// Reduces with g = L L^T and diagonalizes L^{-1} h L^{-T}.
/// Throws NumericalError if g is not SPD or the sizes differ.
std::vector<double> generalized_eigenvalues(const RealMatrix& g, const RealMatrix& h);

/// |a - b| <= tol * max(|a|, |b|, tiny).
bool approx_equal(double a, double b, double tol);
double relative_difference(double a, double b);

}  // namespace poppkit
