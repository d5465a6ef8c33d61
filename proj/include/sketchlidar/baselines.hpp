#pragma once

#include <cstdint>
#include <vector>

#include "sketchlidar/core.hpp"
#include "sketchlidar/detection.hpp"

namespace sketchlidar {

/// Rebinned time-of-flight histogram with T_r coarse bins.
/// Bins cover contiguous ranges of ceil(T/T_r) fine bins; the last coarse bin
/// may be narrower, and expected counts are scaled by actual bin width.
struct CoarseHistogram {
  std::vector<std::uint64_t> counts;
  std::uint32_t bin_width = 0;  ///< fine bins per coarse bin (last may be less)
  std::uint32_t T = 0;
  std::uint64_t n = 0;

  static CoarseHistogram build(const PhotonStream& stream, std::uint32_t T_r);
};

/// Full-data chi-squared test on a coarse histogram: statistic
/// sum_i (c_i - e_i)^2 / e_i against the upper beta-percentile of
/// chi-squared with (#bins - 1) dof. Needs the whole stream.
DetectionResult coarse_hist_test(const PhotonStream& stream, std::uint32_t T_r, double beta);

/// Kolmogorov-Smirnov statistic between the empirical CDF of inter-arrival
/// gaps and Exp(n/T).
double ks_statistic(const PhotonStream& stream);

/// Full-data K-S test of the homogeneous-arrival null. Rejects when the
/// statistic exceeds the asymptotic critical value
/// sqrt(-ln(beta/2)/2) / sqrt(n-1). Discrete timestamps tie heavily, which
/// biases this test; gaps are compared at their right-continuous steps with
/// no jitter added.
DetectionResult ks_interarrival_test(const PhotonStream& stream, double beta);

}  // namespace sketchlidar
