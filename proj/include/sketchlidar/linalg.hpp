#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sketchlidar {

/// In-place lower-triangular Cholesky of a Hermitian matrix (row-major n x n).
/// Returns false if a pivot falls below pivot_tol (matrix not positive
/// definite within tolerance); the matrix is left partially overwritten.
bool cholesky_hermitian(std::span<std::complex<double>> a, std::size_t n,
                        double pivot_tol = 0.0);

/// Solves L L^H x = b in place given the factor from cholesky_hermitian.
void cholesky_solve(std::span<const std::complex<double>> chol, std::size_t n,
                    std::span<std::complex<double>> b);

/// Hermitian positive semidefiniteness check: Cholesky of a + shift*I.
bool is_positive_semidefinite(std::vector<std::complex<double>> a, std::size_t n,
                              double shift);

}  // namespace sketchlidar
