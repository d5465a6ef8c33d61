#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchlidar/core.hpp"

namespace sketchlidar {

/// Finalized sketch: z_j is the mean of e^{i omega_j x} over the n photons
/// seen so far. |z_j| <= 1; when n == 0, z is the zero vector.
struct Sketch {
  std::vector<std::complex<double>> z;
  std::uint64_t n = 0;

  std::uint32_t m() const { return static_cast<std::uint32_t>(z.size()); }
  /// Squared Euclidean norm of z.
  double norm2() const;
};

/// Streaming accumulator for the unnormalized sums sum_j = Σ e^{i omega_j x}.
///
/// One photon costs O(m) and nothing is retained besides the m complex sums,
/// so arbitrarily long acquisitions fit in constant memory. Accumulation uses
/// compensated (Neumaier) summation: merged and single-pass results agree to
/// 1e-12 even for multi-million photon streams. Single writer; merge shards
/// for parallel accumulation.
class SketchAccumulator {
 public:
  explicit SketchAccumulator(FrequencyGrid grid);

  /// Folds one photon into the sums. Throws std::out_of_range if x >= T.
  void update(std::uint32_t x);

  /// Adds another accumulator over the same grid.
  void merge(const SketchAccumulator& other);

  /// z = sum / n; the zero sketch when empty.
  Sketch finalize() const;

  std::uint64_t count() const { return count_; }
  const FrequencyGrid& grid() const { return grid_; }
  /// Compensated partial sum for frequency j in [1, m].
  std::complex<double> sum(std::uint32_t j) const;

 private:
  FrequencyGrid grid_;
  std::vector<std::complex<double>> sum_;
  std::vector<std::complex<double>> comp_;
  std::uint64_t count_ = 0;
};

/// One-pass sketch of a whole stream.
Sketch sketch_stream(const PhotonStream& stream, const FrequencyGrid& grid);

/// Model characteristic function on the grid.
struct ModelCf {
  std::vector<std::complex<double>> psi;
};

/// Psi evaluated at omega_j for j = 1..m. On this grid the uniform background
/// contributes exactly zero, so psi_j = sum_k alpha_k hhat_j e^{i omega_j t_k}.
ModelCf model_cf(const SceneParams& theta, std::span<const std::complex<double>> irf_hat,
                 const FrequencyGrid& grid);

/// Psi at an arbitrary frequency, including the exact discrete-uniform
/// background term (needed off the grid, where it does not vanish).
std::complex<double> model_cf_at(const SceneParams& theta, const Irf& irf, double omega,
                                 std::uint32_t T);

/// Asymptotic covariance of sqrt(n) z under theta:
/// sigma_ij = Psi(omega_i - omega_j) - Psi(omega_i) Psi(-omega_j).
/// Hermitian; the identity matrix when K = 0.
struct SketchCovariance {
  std::uint32_t m = 0;
  std::vector<std::complex<double>> sigma;  ///< row-major m x m

  std::complex<double>& at(std::uint32_t i, std::uint32_t j) { return sigma[i * m + j]; }
  const std::complex<double>& at(std::uint32_t i, std::uint32_t j) const {
    return sigma[i * m + j];
  }
};

SketchCovariance covariance(const SceneParams& theta, const Irf& irf, const FrequencyGrid& grid);

/// covariance() with the pulse spectrum at grid indices 0..m precomputed
/// (exactly the irf_spectrum(irf, m) vector).
SketchCovariance covariance(const SceneParams& theta,
                            std::span<const std::complex<double>> spectrum,
                            const FrequencyGrid& grid);

}  // namespace sketchlidar
