#include "sketchlidar/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sketchlidar {

CoarseHistogram CoarseHistogram::build(const PhotonStream& stream, std::uint32_t T_r) {
  if (T_r < 2) throw std::invalid_argument("CoarseHistogram: T_r must be >= 2");
  if (T_r > stream.T) throw std::invalid_argument("CoarseHistogram: T_r must be <= T");
  CoarseHistogram h;
  h.T = stream.T;
  h.n = stream.n();
  h.bin_width = (stream.T + T_r - 1) / T_r;  // ceil
  const std::uint32_t bins = (stream.T + h.bin_width - 1) / h.bin_width;
  h.counts.assign(bins, 0);
  for (std::uint32_t x : stream.timestamps) ++h.counts[x / h.bin_width];
  return h;
}

DetectionResult coarse_hist_test(const PhotonStream& stream, std::uint32_t T_r, double beta) {
  if (stream.n() == 0) throw std::invalid_argument("coarse_hist_test: empty pixel");
  const CoarseHistogram h = CoarseHistogram::build(stream, T_r);
  const std::uint32_t bins = static_cast<std::uint32_t>(h.counts.size());
  const double n = static_cast<double>(h.n);

  double stat = 0.0;
  for (std::uint32_t i = 0; i < bins; ++i) {
    // Expected count proportional to actual bin width (last bin may be short).
    const std::uint32_t lo = i * h.bin_width;
    const std::uint32_t width = std::min(h.bin_width, h.T - lo);
    const double expected = n * static_cast<double>(width) / static_cast<double>(h.T);
    const double d = static_cast<double>(h.counts[i]) - expected;
    stat += d * d / expected;
  }

  DetectionResult r;
  r.statistic = stat;
  r.threshold = chi2_upper_percentile(bins - 1, beta);
  r.reject_h0 = r.statistic > r.threshold;
  return r;
}

double ks_statistic(const PhotonStream& stream) {
  if (stream.n() < 2) throw std::invalid_argument("ks_statistic: need at least two photons");
  std::vector<std::uint32_t> sorted(stream.timestamps);
  std::sort(sorted.begin(), sorted.end());

  const std::size_t gaps = sorted.size() - 1;
  std::vector<std::uint32_t> dx(gaps);
  for (std::size_t i = 0; i < gaps; ++i) dx[i] = sorted[i + 1] - sorted[i];
  std::sort(dx.begin(), dx.end());

  // Exponential null with rate n/T; empirical CDF compared at its steps.
  const double rate = static_cast<double>(stream.n()) / static_cast<double>(stream.T);
  const double inv = 1.0 / static_cast<double>(gaps);
  double d = 0.0;
  for (std::size_t i = 0; i < gaps; ++i) {
    const double f = -std::expm1(-rate * static_cast<double>(dx[i]));
    d = std::max(d, std::max(static_cast<double>(i + 1) * inv - f,
                             f - static_cast<double>(i) * inv));
  }
  return d;
}

DetectionResult ks_interarrival_test(const PhotonStream& stream, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("ks_interarrival_test: beta must be in (0, 1)");
  DetectionResult r;
  r.statistic = ks_statistic(stream);
  const double c = std::sqrt(-0.5 * std::log(0.5 * beta));
  r.threshold = c / std::sqrt(static_cast<double>(stream.n() - 1));
  r.reject_h0 = r.statistic > r.threshold;
  return r;
}

}  // namespace sketchlidar
