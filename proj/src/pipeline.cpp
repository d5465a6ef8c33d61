#include "sketchlidar/pipeline.hpp"

#include <stdexcept>

#include "sketchlidar/parallel.hpp"

namespace sketchlidar {

SketchImage sketch_scene(const Scene& scene, const FrequencyGrid& grid, unsigned threads) {
  if (grid.T() != scene.T) throw std::invalid_argument("sketch_scene: grid T mismatch");
  SketchImage image;
  image.width = scene.width;
  image.height = scene.height;
  image.m = grid.m();
  image.T = scene.T;
  image.pixels.resize(scene.pixels.size());
  parallel_for(scene.pixels.size(), threads,
               [&](std::size_t k) { image.pixels[k] = sketch_stream(scene.pixels[k], grid); });
  return image;
}

SceneDetection detect_scene(const SketchImage& image, const DetectionConfig& cfg, double tv_tau,
                            const TvOptions& tv_opts, unsigned threads) {
  SceneDetection out;
  out.threshold = chi2_upper_percentile(cfg.dof_for(image.m), cfg.beta);
  out.stats.width = image.width;
  out.stats.height = image.height;
  out.stats.values.assign(image.pixels.size(), 0.0);
  out.stats.mask.assign(image.pixels.size(), 1);
  out.labels.assign(image.pixels.size(), PixelLabel::background);

  parallel_for(image.pixels.size(), threads, [&](std::size_t k) {
    DetectionResult r;
    const PixelLabel label = classify(image.pixels[k], cfg, &r);
    out.labels[k] = label;
    if (label == PixelLabel::insufficient) {
      out.stats.mask[k] = 0;
    } else {
      out.stats.values[k] = r.statistic;
    }
  });

  out.map = detection_map(out.stats, out.threshold, tv_tau, tv_opts);
  return out;
}

std::vector<std::optional<DepthEstimate>> estimate_scene(const SketchImage& image, const Irf& irf,
                                                         const EstimateConfig& cfg,
                                                         unsigned threads) {
  if (irf.T() != image.T) throw std::invalid_argument("estimate_scene: pulse length mismatch");
  const FrequencyGrid grid(image.m, image.T);
  const auto spectrum = irf_spectrum(irf, image.m);
  std::vector<std::optional<DepthEstimate>> out(image.pixels.size());
  parallel_for(image.pixels.size(), threads, [&](std::size_t k) {
    out[k] = estimate_pixel(image.pixels[k], spectrum, grid, cfg);
  });
  return out;
}

double map_pd(const DetectionMap& map, const std::vector<std::uint8_t>& truth) {
  std::size_t hits = 0, total = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (!truth[k]) continue;
    ++total;
    if (map.v[k]) ++hits;
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

double map_pfa(const DetectionMap& map, const std::vector<std::uint8_t>& truth) {
  std::size_t hits = 0, total = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k]) continue;
    ++total;
    if (map.v[k]) ++hits;
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

}  // namespace sketchlidar
