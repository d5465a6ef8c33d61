#pragma once

#include <cstdint>
#include <vector>

#include "sketchlidar/detection.hpp"

namespace sketchlidar {

/// Image of shifted detection statistics y = statistic - threshold, row-major.
/// mask marks valid pixels; masked pixels (insufficient data) are excluded
/// from the data-fidelity term and filled in by the regularizer.
struct StatImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;  ///< empty means all valid; 1 = valid

  std::size_t size() const { return static_cast<std::size_t>(width) * height; }
  bool all_valid() const;
};

/// Binary surface map.
struct DetectionMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> v;
};

struct TvOptions {
  double tol = 1e-6;            ///< stop when duality gap <= tol * ||y||^2
  std::uint32_t max_iters = 200;
};

/// Minimizer of ||v - y||_2^2 + tau * TV(v) with isotropic TV on forward
/// differences and symmetric boundary.
///
/// All-valid images are solved by accelerated projected gradient on the dual
/// (the objective is tracked so the reported iterate never increases it, and
/// iteration stops at the duality-gap tolerance). Images with masked pixels
/// use a primal-dual scheme with the fidelity weight zeroed on the mask and
/// run to the iteration cap. tau = 0 returns y unchanged.
std::vector<double> tv_denoise(const StatImage& y, double tau, const TvOptions& opts = {});

/// Objective ||v - y||^2 + tau TV(v) restricted to valid pixels.
double tv_objective(const StatImage& y, const std::vector<double>& v, double tau);

/// Regularized detection map: y = stats - threshold, v = 1 where
/// tv_denoise(y, tau) > 0. stats holds raw statistics; masked pixels enter
/// with y = 0 and no fidelity, so the regularizer decides them. At tau = 0
/// this equals the per-pixel threshold rule bit for bit.
DetectionMap detection_map(const StatImage& stats, double threshold, double tau,
                           const TvOptions& opts = {});

}  // namespace sketchlidar
