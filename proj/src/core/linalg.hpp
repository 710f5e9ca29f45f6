#pragma once

// Dense linear algebra helpers: exact rank over GF(p), numerical rank and
// least squares over the complex numbers, univariate root finding.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"
#include "scalar.hpp"

namespace ratnet {

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rank by Gaussian elimination over GF(p); entries are residues in [0, p).
std::size_t rank_mod_p(std::vector<std::vector<std::uint64_t>> rows, std::uint64_t p);

/// Singular values in decreasing order.
std::vector<double> singular_values(const Matrix<cplx>& a);
std::vector<double> singular_values(const Matrix<double>& a);

/// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const Matrix<cplx>& a, double rel_tol);
std::size_t numerical_rank(const Matrix<double>& a, double rel_tol);

struct LeastSquares {
    std::vector<cplx> x;
    double residual = 0.0;  // ||A x - b||_inf
};

/// Minimum-norm least-squares solution of A x = b.
LeastSquares least_squares(const Matrix<cplx>& a, const std::vector<cplx>& b);

/// General complex inverse; throws std::domain_error when singular.
Matrix<cplx> inverse(const Matrix<cplx>& a);

/// Roots of c[0] y^m + c[1] y^{m-1} + ... + c[m] (descending coefficients).
/// Leading coefficient must be nonzero. Companion eigenvalues polished by Newton.
std::vector<cplx> roots_univariate(const std::vector<cplx>& coeffs, double tol = 1e-10);

/// Horner evaluation with descending coefficients.
cplx horner(const std::vector<cplx>& coeffs, cplx y);

/// Random orthogonal n x n matrix (QR of a Gaussian matrix, sign-fixed).
Matrix<double> random_orthogonal(std::size_t n, std::uint64_t seed);

/// Determinant of a square complex matrix via partial-pivot LU.
cplx determinant(const Matrix<cplx>& a);

}  // namespace ratnet
