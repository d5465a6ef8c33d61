#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>

#include "sketchlidar/core.hpp"
#include "sketchlidar/detection.hpp"
#include "sketchlidar/sketch.hpp"

namespace sketchlidar {

struct DepthEstimate {
  double t_hat = 0.0;      ///< depth in bins, wrapped to [0, T)
  double alpha_hat = 0.0;  ///< signal fraction, clamped to [0, 1]
  double objective = 0.0;  ///< weighted squared residual at the estimate
  bool converged = false;
  bool degenerate = false;       ///< initializer saw a flat objective (z ~ 0)
  bool weight_fallback = false;  ///< covariance was singular, identity used
};

enum class WeightMode : std::uint8_t {
  identity,
  /// W = inverse covariance evaluated at the current parameter estimate,
  /// refreshed once per outer pass (plug-in feasible GLS).
  plugin_covariance,
};

/// Closed-form single-surface inversion from the first frequency:
/// t = arg(z_1 conj(hhat_1)) / omega_1 (mod T), alpha = |z_1| / |hhat_1|
/// clamped to [0, 1]. omega_1 spans one full period over [0, T), so the
/// phase determines the depth with no wrap ambiguity.
DepthEstimate closed_form_single(const Sketch& sketch,
                                 std::span<const std::complex<double>> irf_hat,
                                 const FrequencyGrid& grid);

/// Correlation initializer: t0 maximizes Re sum_j z_j conj(hhat_j) e^{-i omega_j t}
/// over a uniform depth grid, then alpha0 by least squares. Robust to noise
/// on every frequency at once; flags a degenerate (all-zero) sketch.
DepthEstimate matched_filter_init(const Sketch& sketch,
                                  std::span<const std::complex<double>> irf_hat,
                                  const FrequencyGrid& grid, std::uint32_t grid_points);

/// Damped Gauss-Newton refinement of (t, alpha) minimizing the weighted
/// residual ||z - Psi(t, alpha)||^2_W over the 2m real components. alpha is
/// driven through a logit so steps stay smooth; accepted steps never increase
/// the objective under the active weights. Stops at gradient norm < 1e-9 or
/// 100 iterations.
DepthEstimate wls_refine(const Sketch& sketch, const DepthEstimate& init, const Irf& irf,
                         const FrequencyGrid& grid, WeightMode weights);

/// wls_refine() with irf_spectrum(irf, m) precomputed.
DepthEstimate wls_refine(const Sketch& sketch, const DepthEstimate& init,
                         std::span<const std::complex<double>> spectrum,
                         const FrequencyGrid& grid, WeightMode weights);

struct EstimateConfig {
  DetectionConfig detection;
  WeightMode weights = WeightMode::plugin_covariance;
  std::uint32_t init_grid_points = 0;  ///< 0 = max(64, 8m)
};

/// Full per-pixel pipeline: detect, and only if a surface is present
/// initialize and refine. Cost is independent of the photon count and of T.
std::optional<DepthEstimate> estimate_pixel(const Sketch& sketch, const Irf& irf,
                                            const FrequencyGrid& grid,
                                            const EstimateConfig& cfg);

/// estimate_pixel() with irf_spectrum(irf, m) precomputed; per-pixel cost is
/// then O(m^2) plus the initializer grid, independent of n and T.
std::optional<DepthEstimate> estimate_pixel(const Sketch& sketch,
                                            std::span<const std::complex<double>> spectrum,
                                            const FrequencyGrid& grid,
                                            const EstimateConfig& cfg);

}  // namespace sketchlidar
