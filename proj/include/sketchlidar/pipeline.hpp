#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sketchlidar/detection.hpp"
#include "sketchlidar/estimation.hpp"
#include "sketchlidar/io.hpp"
#include "sketchlidar/simulator.hpp"
#include "sketchlidar/tv.hpp"

namespace sketchlidar {

/// Sketches every pixel of an in-memory scene (parallel across pixels).
SketchImage sketch_scene(const Scene& scene, const FrequencyGrid& grid, unsigned threads = 0);

/// Per-pixel detection plus optional TV-regularized map.
struct SceneDetection {
  double threshold = 0.0;
  StatImage stats;                 ///< raw statistics; mask = valid pixels
  std::vector<PixelLabel> labels;  ///< per-pixel outcome before regularization
  DetectionMap map;                ///< tau = 0 reproduces labels == surface
};

SceneDetection detect_scene(const SketchImage& image, const DetectionConfig& cfg, double tv_tau,
                            const TvOptions& tv_opts = {}, unsigned threads = 0);

/// Runs the estimation pipeline on every pixel (parallel, deterministic).
std::vector<std::optional<DepthEstimate>> estimate_scene(const SketchImage& image, const Irf& irf,
                                                         const EstimateConfig& cfg,
                                                         unsigned threads = 0);

/// Detection and false-alarm rates of a map against ground truth.
double map_pd(const DetectionMap& map, const std::vector<std::uint8_t>& truth);
double map_pfa(const DetectionMap& map, const std::vector<std::uint8_t>& truth);

}  // namespace sketchlidar
