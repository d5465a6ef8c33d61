#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sketchlidar {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Per-pixel photon arrivals: integer TCSPC bin indices in [0, T-1].
/// bin_width is physical metadata only; all math works in bin units.
struct PhotonStream {
  std::vector<std::uint32_t> timestamps;
  std::uint32_t T = 0;
  double bin_width = 0.0;  ///< seconds per bin

  PhotonStream() = default;
  /// Validates T >= 2 and every timestamp < T.
  PhotonStream(std::vector<std::uint32_t> ts, std::uint32_t T_, double bin_width_ = 0.0);

  std::size_t n() const { return timestamps.size(); }
};

/// Instrument response: nonnegative per-bin pulse shape h with integral H.
struct Irf {
  std::vector<double> h;
  double H = 0.0;

  /// Validates h nonnegative with positive sum.
  explicit Irf(std::vector<double> h_);

  std::uint32_t T() const { return static_cast<std::uint32_t>(h.size()); }
};

/// Unnormalized Gaussian pulse exp(-(t-center)^2 / (2 sigma^2)) sampled at
/// integer bins 0..T-1. Tails are truncated at the histogram boundary.
Irf make_gaussian_irf(std::uint32_t T, double sigma, double center);

/// Probability mass of a surface at the given depth: h circularly shifted by
/// round(depth) bins (mod T) and normalized by H. Sums to 1 exactly.
std::vector<double> shifted_pmf(const Irf& irf, double depth);

/// Sampling frequencies omega_j = 2*pi*j/T for j = 1..m.
///
/// For moderate T a table of the T-th roots of unity is kept so that
/// e^{i omega_j x} = root[(j*x) mod T] is available by lookup, which is both
/// faster and more accurate than per-photon trig.
class FrequencyGrid {
 public:
  FrequencyGrid(std::uint32_t m, std::uint32_t T);

  std::uint32_t m() const { return m_; }
  std::uint32_t T() const { return T_; }
  /// omega_j for j in [1, m].
  double omega(std::uint32_t j) const { return omegas_[j - 1]; }
  std::span<const double> omegas() const { return omegas_; }

  bool has_root_table() const { return roots_ != nullptr; }
  /// e^{i 2 pi k / T}; requires has_root_table() and k < T.
  std::complex<double> unit_root(std::uint64_t k) const { return (*roots_)[k]; }

  bool same_as(const FrequencyGrid& other) const {
    return m_ == other.m_ && T_ == other.T_;
  }

  /// Largest T for which the root table is materialized.
  static constexpr std::uint32_t kMaxRootTableT = 1u << 20;

 private:
  std::uint32_t m_ = 0;
  std::uint32_t T_ = 0;
  std::vector<double> omegas_;
  std::shared_ptr<const std::vector<std::complex<double>>> roots_;
};

/// Mixture parameters: K surfaces (0 or 1 supported), mixing weights
/// alphas[0..K] with alphas[0] the background weight, and depths in bins.
struct SceneParams {
  std::uint32_t K = 0;
  std::vector<double> alphas;  ///< size K+1, alphas[0] = background weight
  std::vector<double> depths;  ///< size K

  SceneParams(std::uint32_t K_, std::vector<double> alphas_, std::vector<double> depths_);

  static SceneParams background();
  static SceneParams single_surface(double alpha1, double depth);
  /// alpha1 = sbr / (1 + sbr).
  static SceneParams from_sbr(double sbr, double depth);

  double sbr() const;
};

/// Normalized transform of the pulse on the grid: for j = 1..m,
/// hhat_j = (1/H) sum_t h(t) e^{i omega_j t}.
std::vector<std::complex<double>> irf_transform(const Irf& irf, const FrequencyGrid& grid);

/// Same transform evaluated at grid indices 0..kmax inclusive (index 0 is 1).
std::vector<std::complex<double>> irf_spectrum(const Irf& irf, std::uint32_t kmax);

/// Characteristic function of the discrete uniform distribution on {0..T-1},
/// evaluated exactly. Zero at every nonzero grid frequency 2*pi*k/T.
std::complex<double> background_cf(double omega, std::uint32_t T);

}  // namespace sketchlidar
