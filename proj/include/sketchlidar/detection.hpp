#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchlidar/core.hpp"
#include "sketchlidar/sketch.hpp"

namespace sketchlidar {

/// Normalization of the test statistic and the matching degrees of freedom.
///
/// scaled_2m: statistic 2n||z||^2 against chi-squared with 2m dof. Under the
/// background-only null each of the 2m real components of sqrt(2n) z is
/// asymptotically standard normal, so the null law is free of n.
/// raw_ecf: statistic ||z||^2 against chi-squared with m-1 dof, kept for
/// comparison with the classical ECF-test convention.
enum class StatisticMode : std::uint8_t { scaled_2m, raw_ecf };

struct DetectionConfig {
  double beta = 0.05;
  StatisticMode mode = StatisticMode::scaled_2m;
  std::uint64_t min_photons = 5;  ///< below this a pixel is "insufficient data"

  std::uint32_t dof_for(std::uint32_t m) const;
};

struct DetectionResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject_h0 = false;  ///< statistic > threshold
};

/// Per-pixel outcome used by detection maps.
enum class PixelLabel : std::uint8_t { background = 0, surface = 1, insufficient = 2 };

/// ||z||^2 or 2n||z||^2 depending on mode. Throws on an empty sketch.
double test_statistic(const Sketch& sketch, StatisticMode mode = StatisticMode::scaled_2m);

/// Upper beta-percentile of the chi-squared distribution with dof degrees of
/// freedom: P(X > result) = beta. Results are memoized per (dof, beta).
double chi2_upper_percentile(std::uint32_t dof, double beta);

/// Goodness-of-fit test of the uniform-background null from the sketch alone.
DetectionResult detect(const Sketch& sketch, const DetectionConfig& cfg);

/// detect() with min_photons handling: pixels with too few photons are
/// labeled insufficient instead of background. result may be null; it is
/// written only when the test ran.
PixelLabel classify(const Sketch& sketch, const DetectionConfig& cfg,
                    DetectionResult* result = nullptr);

/// Reference sketch of calibration background photons (their plain sketch).
Sketch background_reference(const PhotonStream& calibration, const FrequencyGrid& grid);

/// Exact expectation E[Phi(x)] under an explicit background distribution
/// pi_b on {0..T-1}. pi_b must be nonnegative and sum to 1 within 1e-9.
std::vector<std::complex<double>> background_reference(std::span<const double> pi_b,
                                                       const FrequencyGrid& grid);

/// Test with the data-driven background reference: statistic built from
/// z - zhat. With a uniform background (zhat = 0) this reduces to detect().
/// The chi-squared null is approximate here; the reference shifts the mean
/// but the covariance is no longer exactly identity.
DetectionResult detect_with_background(const Sketch& sketch,
                                       std::span<const std::complex<double>> zhat,
                                       const DetectionConfig& cfg);

}  // namespace sketchlidar
