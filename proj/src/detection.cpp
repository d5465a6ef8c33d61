#include "sketchlidar/detection.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "sketchlidar/gamma.hpp"

namespace sketchlidar {

std::uint32_t DetectionConfig::dof_for(std::uint32_t m) const {
  if (mode == StatisticMode::scaled_2m) return 2 * m;
  // Classical ECF convention nu = m - 2K - 1 under the K = 0 null.
  return m > 1 ? m - 1 : 1;
}

double test_statistic(const Sketch& sketch, StatisticMode mode) {
  if (sketch.n == 0) throw std::invalid_argument("test_statistic: empty pixel");
  const double d2 = sketch.norm2();
  return mode == StatisticMode::scaled_2m ? 2.0 * static_cast<double>(sketch.n) * d2 : d2;
}

double chi2_upper_percentile(std::uint32_t dof, double beta) {
  if (dof < 1) throw std::invalid_argument("chi2_upper_percentile: dof must be >= 1");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("chi2_upper_percentile: beta must be in (0, 1)");

  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, double>, double> cache;
  const auto key = std::make_pair(dof, beta);
  // Computed under the lock: misses are once per (dof, beta), and lgamma's
  // signgam side channel is not safe to race.
  std::scoped_lock lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const double value = 2.0 * inverse_gamma_q(0.5 * dof, beta);
  cache.emplace(key, value);
  return value;
}

DetectionResult detect(const Sketch& sketch, const DetectionConfig& cfg) {
  DetectionResult r;
  r.statistic = test_statistic(sketch, cfg.mode);
  r.threshold = chi2_upper_percentile(cfg.dof_for(sketch.m()), cfg.beta);
  r.reject_h0 = r.statistic > r.threshold;
  return r;
}

PixelLabel classify(const Sketch& sketch, const DetectionConfig& cfg, DetectionResult* result) {
  if (sketch.n < cfg.min_photons) return PixelLabel::insufficient;
  const DetectionResult r = detect(sketch, cfg);
  if (result) *result = r;
  return r.reject_h0 ? PixelLabel::surface : PixelLabel::background;
}

Sketch background_reference(const PhotonStream& calibration, const FrequencyGrid& grid) {
  if (calibration.n() == 0)
    throw std::invalid_argument("background_reference: empty calibration stream");
  return sketch_stream(calibration, grid);
}

std::vector<std::complex<double>> background_reference(std::span<const double> pi_b,
                                                       const FrequencyGrid& grid) {
  if (pi_b.size() != grid.T())
    throw std::invalid_argument("background_reference: distribution length must equal T");
  double total = 0.0;
  for (double p : pi_b) {
    if (!(p >= 0.0))
      throw std::invalid_argument("background_reference: probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("background_reference: probabilities must sum to 1");

  std::vector<std::complex<double>> zhat(grid.m(), {0.0, 0.0});
  for (std::uint32_t j = 1; j <= grid.m(); ++j) {
    double re = 0.0, im = 0.0;
    for (std::uint32_t t = 0; t < grid.T(); ++t) {
      if (pi_b[t] == 0.0) continue;
      const std::complex<double> w =
          grid.has_root_table()
              ? grid.unit_root((static_cast<std::uint64_t>(j) * t) % grid.T())
              : std::polar(1.0, grid.omega(j) * t);
      re += pi_b[t] * w.real();
      im += pi_b[t] * w.imag();
    }
    zhat[j - 1] = {re, im};
  }
  return zhat;
}

DetectionResult detect_with_background(const Sketch& sketch,
                                       std::span<const std::complex<double>> zhat,
                                       const DetectionConfig& cfg) {
  if (zhat.size() != sketch.m())
    throw std::invalid_argument("detect_with_background: reference length mismatch");
  if (sketch.n == 0) throw std::invalid_argument("detect_with_background: empty pixel");
  double d2 = 0.0;
  for (std::uint32_t j = 0; j < sketch.m(); ++j) d2 += std::norm(sketch.z[j] - zhat[j]);
  DetectionResult r;
  r.statistic =
      cfg.mode == StatisticMode::scaled_2m ? 2.0 * static_cast<double>(sketch.n) * d2 : d2;
  r.threshold = chi2_upper_percentile(cfg.dof_for(sketch.m()), cfg.beta);
  r.reject_h0 = r.statistic > r.threshold;
  return r;
}

}  // namespace sketchlidar
