#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sketchlidar/core.hpp"
#include "sketchlidar/rng.hpp"

namespace sketchlidar {

/// Draws photons from the mixture: background photons uniform on {0..T-1},
/// surface photons from the circularly shifted pulse distribution.
class MixtureSampler {
 public:
  MixtureSampler(const SceneParams& theta, const Irf& irf, std::uint32_t T);

  std::uint32_t sample(Rng& rng) const;

 private:
  std::uint32_t T_;
  std::vector<double> cum_alpha_;       ///< cumulative weights, background first
  std::vector<double> irf_cdf_;         ///< cumulative h / H
  std::vector<std::uint32_t> shifts_;   ///< rounded surface depths
};

PhotonStream sample_photons(const SceneParams& theta, const Irf& irf, std::uint32_t T,
                            std::uint32_t n, Rng& rng);

/// Monte Carlo study configuration. Grids default to the desk-scale setup:
/// SBR log-spaced over [0.01, 100] (25 points), n log-spaced over [5, 5000]
/// (25 points), 500 trials per cell.
struct ExperimentSpec {
  std::uint32_t T = 5000;
  double sigma = 50.0;   ///< Gaussian pulse width in bins
  double depth = -1.0;   ///< surface depth; < 0 means T/2
  std::vector<double> sbr_grid;
  std::vector<std::uint32_t> n_grid;
  std::uint32_t trials = 500;
  double beta = 0.05;
  std::vector<std::uint32_t> sketch_sizes = {10};
  std::vector<std::uint32_t> hist_bins;  ///< coarse-histogram baselines (T_r values)
  bool include_ks = false;
  bool poisson_counts = false;  ///< draw n ~ Poisson(cell n) instead of fixed
  std::uint64_t seed = 1;
  unsigned threads = 0;

  static std::vector<double> default_sbr_grid();
  static std::vector<std::uint32_t> default_n_grid();
  /// Fills empty grids with the defaults.
  void finalize_defaults();
};

struct DetectorSpec {
  enum class Kind : std::uint8_t { sketch, hist, ks };
  Kind kind = Kind::sketch;
  std::uint32_t param = 0;  ///< sketch size m or coarse bin count T_r

  std::string name() const;
};

std::vector<DetectorSpec> detectors_of(const ExperimentSpec& spec);

/// Empirical probability of detection per detector over the (SBR, n) grid.
struct PdGrid {
  ExperimentSpec spec;
  std::vector<DetectorSpec> detectors;
  /// pd[d][s][k]: detector d, SBR index s, photon-count index k.
  std::vector<std::vector<std::vector<double>>> pd;
};

PdGrid run_pd_grid(const ExperimentSpec& spec);

/// Adjacent-cell decreases beyond se_mult binomial standard errors, along
/// both grid axes. Run automatically by run_pd_grid at se_mult = 2 to warn
/// on stderr; exposed for tests.
std::size_t count_monotonicity_violations(const PdGrid& grid, double se_mult);

/// Empirical false-alarm rate per detector on pure-background data.
struct PfaCurve {
  ExperimentSpec spec;
  std::vector<DetectorSpec> detectors;
  std::vector<std::vector<double>> pfa;  ///< pfa[d][k]
};

PfaCurve run_pfa_curve(const ExperimentSpec& spec);

/// Smallest grid n reaching the target PD per SBR (running-max along n to
/// smooth Monte Carlo dips). n_required = -1 marks SBRs that never reach it.
struct LevelCurve {
  DetectorSpec detector;
  std::vector<double> sbr;
  std::vector<std::int64_t> n_required;
};

std::vector<LevelCurve> run_level_curves(const PdGrid& grid, double target_pd);

/// Synthetic stand-in for a real scene: a contiguous foreground region over
/// uniform background, with an optional radial reflectivity falloff so pixel
/// photon counts span dim rims to bright centers.
struct SceneSpec {
  std::uint32_t width = 200;
  std::uint32_t height = 200;
  std::uint32_t T = 2700;
  double sigma = 27.0;
  std::string shape = "disk";  ///< "disk" or "rect"
  double shape_scale = 0.7;    ///< region diameter relative to min(width, height)
  double sbr = 0.29;
  double depth = -1.0;  ///< < 0 means T/2
  double mean_photons = 90.0;
  std::string reflectivity = "radial";  ///< "uniform" or "radial"
  double reflectivity_range = 200.0;    ///< center-to-rim brightness ratio
  bool poisson_counts = true;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct Scene {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t T = 0;
  std::vector<PhotonStream> pixels;  ///< row-major
  std::vector<std::uint8_t> truth;   ///< 1 = surface present
};

Scene make_synthetic_scene(const SceneSpec& spec, const Irf& irf);

}  // namespace sketchlidar
