#include "sketchlidar/linalg.hpp"

#include <cmath>

namespace sketchlidar {

bool cholesky_hermitian(std::span<std::complex<double>> a, std::size_t n, double pivot_tol) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(a[j * n + k]);
    if (!(d > pivot_tol)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      std::complex<double> s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * std::conj(a[j * n + k]);
      a[i * n + j] = s / ljj;
    }
  }
  return true;
}

void cholesky_solve(std::span<const std::complex<double>> chol, std::size_t n,
                    std::span<std::complex<double>> b) {
  // L y = b
  for (std::size_t i = 0; i < n; ++i) {
    std::complex<double> s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol[i * n + k] * b[k];
    b[i] = s / chol[i * n + i].real();
  }
  // L^H x = y
  for (std::size_t ii = n; ii-- > 0;) {
    std::complex<double> s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(chol[k * n + ii]) * b[k];
    b[ii] = s / chol[ii * n + ii].real();
  }
}

bool is_positive_semidefinite(std::vector<std::complex<double>> a, std::size_t n, double shift) {
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += shift;
  return cholesky_hermitian(a, n, 0.0);
}

}  // namespace sketchlidar
