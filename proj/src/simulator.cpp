#include "sketchlidar/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>

#include "sketchlidar/baselines.hpp"
#include "sketchlidar/detection.hpp"
#include "sketchlidar/parallel.hpp"
#include "sketchlidar/sketch.hpp"

namespace sketchlidar {

MixtureSampler::MixtureSampler(const SceneParams& theta, const Irf& irf, std::uint32_t T)
    : T_(T) {
  if (irf.T() != T) throw std::invalid_argument("MixtureSampler: pulse length must equal T");
  cum_alpha_.resize(theta.K + 1);
  double acc = 0.0;
  for (std::uint32_t k = 0; k <= theta.K; ++k) {
    acc += theta.alphas[k];
    cum_alpha_[k] = acc;
  }
  irf_cdf_.resize(T);
  double c = 0.0;
  for (std::uint32_t t = 0; t < T; ++t) {
    c += irf.h[t] / irf.H;
    irf_cdf_[t] = c;
  }
  irf_cdf_.back() = 1.0;
  shifts_.resize(theta.K);
  for (std::uint32_t k = 0; k < theta.K; ++k) {
    const std::int64_t s = static_cast<std::int64_t>(std::llround(theta.depths[k]));
    shifts_[k] = static_cast<std::uint32_t>(((s % T) + T) % T);
  }
}

std::uint32_t MixtureSampler::sample(Rng& rng) const {
  const double u = rng.next_double();
  if (u < cum_alpha_[0] || shifts_.empty()) return rng.next_below(T_);
  std::uint32_t k = 0;
  while (k + 1 < shifts_.size() && u >= cum_alpha_[k + 1]) ++k;
  const double v = rng.next_double();
  const auto it = std::lower_bound(irf_cdf_.begin(), irf_cdf_.end(), v);
  const std::uint32_t base = static_cast<std::uint32_t>(it - irf_cdf_.begin());
  return (base + shifts_[k]) % T_;
}

PhotonStream sample_photons(const SceneParams& theta, const Irf& irf, std::uint32_t T,
                            std::uint32_t n, Rng& rng) {
  const MixtureSampler sampler(theta, irf, T);
  std::vector<std::uint32_t> ts(n);
  for (std::uint32_t i = 0; i < n; ++i) ts[i] = sampler.sample(rng);
  return PhotonStream(std::move(ts), T);
}

std::vector<double> ExperimentSpec::default_sbr_grid() {
  std::vector<double> g(25);
  for (int i = 0; i < 25; ++i) g[i] = std::pow(10.0, -2.0 + 4.0 * i / 24.0);
  return g;
}

std::vector<std::uint32_t> ExperimentSpec::default_n_grid() {
  std::vector<std::uint32_t> g(25);
  for (int i = 0; i < 25; ++i)
    g[i] = static_cast<std::uint32_t>(std::llround(5.0 * std::pow(1000.0, i / 24.0)));
  return g;
}

void ExperimentSpec::finalize_defaults() {
  if (trials < 1) throw std::invalid_argument("ExperimentSpec: need at least one trial");
  if (sbr_grid.empty()) sbr_grid = default_sbr_grid();
  if (n_grid.empty()) n_grid = default_n_grid();
  if (depth < 0.0) depth = 0.5 * T;
}

std::string DetectorSpec::name() const {
  char buf[32];
  switch (kind) {
    case Kind::sketch:
      std::snprintf(buf, sizeof buf, "sketch_m%u", param);
      break;
    case Kind::hist:
      std::snprintf(buf, sizeof buf, "hist_Tr%u", param);
      break;
    case Kind::ks:
      std::snprintf(buf, sizeof buf, "ks");
      break;
  }
  return buf;
}

std::vector<DetectorSpec> detectors_of(const ExperimentSpec& spec) {
  std::vector<DetectorSpec> d;
  for (std::uint32_t m : spec.sketch_sizes) d.push_back({DetectorSpec::Kind::sketch, m});
  for (std::uint32_t tr : spec.hist_bins) d.push_back({DetectorSpec::Kind::hist, tr});
  if (spec.include_ks) d.push_back({DetectorSpec::Kind::ks, 0});
  return d;
}

namespace {

struct CellCounts {
  std::vector<std::uint32_t> detections;  // per detector
};

// Shared per-cell trial engine: one photon draw is reused by every detector.
// Sketch detectors of different m share the largest accumulator since sketch
// components are nested (same grid, leading frequencies).
class TrialRunner {
 public:
  TrialRunner(const ExperimentSpec& spec, const std::vector<DetectorSpec>& detectors,
              const Irf& irf)
      : spec_(spec), detectors_(detectors), irf_(irf) {
    for (const auto& d : detectors) {
      if (d.kind == DetectorSpec::Kind::sketch) m_max_ = std::max(m_max_, d.param);
      else needs_stream_ = true;
    }
    if (m_max_ > 0) grid_.emplace(m_max_, spec.T);
    cfg_.beta = spec.beta;
    cfg_.min_photons = 0;  // calibration studies exercise every n
  }

  CellCounts run_cell(const SceneParams& theta, std::uint32_t n_photons) const {
    const MixtureSampler sampler(theta, irf_, spec_.T);
    CellCounts out;
    out.detections.assign(detectors_.size(), 0);
    std::vector<std::uint32_t> stream;
    for (std::uint32_t trial = 0; trial < spec_.trials; ++trial) {
      std::uint32_t n = n_photons;
      if (spec_.poisson_counts) {
        Rng count_rng = Rng::substream(spec_.seed, trial, 0xc0c0c0c0ULL);
        n = count_rng.poisson(static_cast<double>(n_photons));
      }

      std::optional<SketchAccumulator> acc;
      if (grid_) acc.emplace(*grid_);
      if (needs_stream_) {
        stream.clear();
        stream.reserve(n);
      }
      // Photon i of trial t depends on (seed, t, i) only, never on the grid
      // cell: cells along the n axis see prefixes of one common stream and
      // cells along the SBR axis share the underlying uniforms. Adjacent
      // cells are then positively correlated, which keeps Monte Carlo noise
      // out of the monotone cell-to-cell comparisons.
      for (std::uint32_t i = 0; i < n; ++i) {
        Rng photon_rng = Rng::substream(spec_.seed, trial, i);
        const std::uint32_t x = sampler.sample(photon_rng);
        if (acc) acc->update(x);
        if (needs_stream_) stream.push_back(x);
      }

      Sketch full;
      if (acc) full = acc->finalize();
      PhotonStream ps;
      if (needs_stream_) ps = PhotonStream(stream, spec_.T);

      for (std::size_t d = 0; d < detectors_.size(); ++d) {
        const auto& det = detectors_[d];
        bool reject = false;
        switch (det.kind) {
          case DetectorSpec::Kind::sketch: {
            if (full.n == 0) break;
            Sketch sub;
            sub.n = full.n;
            sub.z.assign(full.z.begin(), full.z.begin() + det.param);
            reject = detect(sub, cfg_).reject_h0;
            break;
          }
          case DetectorSpec::Kind::hist:
            if (ps.n() > 0) reject = coarse_hist_test(ps, det.param, spec_.beta).reject_h0;
            break;
          case DetectorSpec::Kind::ks:
            if (ps.n() >= 2) reject = ks_interarrival_test(ps, spec_.beta).reject_h0;
            break;
        }
        if (reject) ++out.detections[d];
      }
    }
    return out;
  }

 private:
  const ExperimentSpec& spec_;
  const std::vector<DetectorSpec>& detectors_;
  const Irf& irf_;
  std::uint32_t m_max_ = 0;
  bool needs_stream_ = false;
  std::optional<FrequencyGrid> grid_;
  DetectionConfig cfg_;
};

}  // namespace

PdGrid run_pd_grid(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.finalize_defaults();
  // Pulse centered mid-range: sigma up to T/100 sees no boundary truncation,
  // and detection is invariant to circular shifts so only the shape matters.
  const Irf irf = make_gaussian_irf(spec.T, spec.sigma, 0.5 * spec.T);
  PdGrid grid;
  grid.spec = spec;
  grid.detectors = detectors_of(spec);
  const TrialRunner runner(spec, grid.detectors, irf);

  const std::size_t ns = spec.sbr_grid.size();
  const std::size_t nn = spec.n_grid.size();
  grid.pd.assign(grid.detectors.size(),
                 std::vector<std::vector<double>>(ns, std::vector<double>(nn, 0.0)));

  std::vector<CellCounts> cells(ns * nn);
  parallel_for(ns * nn, spec.threads, [&](std::size_t idx) {
    const std::size_t s = idx / nn;
    const std::size_t k = idx % nn;
    const SceneParams theta = SceneParams::from_sbr(spec.sbr_grid[s], spec.depth);
    cells[idx] = runner.run_cell(theta, spec.n_grid[k]);
  });
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const std::size_t s = idx / nn;
    const std::size_t k = idx % nn;
    for (std::size_t d = 0; d < grid.detectors.size(); ++d)
      grid.pd[d][s][k] = static_cast<double>(cells[idx].detections[d]) / spec.trials;
  }

  const std::size_t violations = count_monotonicity_violations(grid, 2.0);
  if (violations > 0)
    std::fprintf(stderr, "run_pd_grid: %zu adjacent cells decrease beyond 2 SE\n", violations);
  return grid;
}

std::size_t count_monotonicity_violations(const PdGrid& grid, double se_mult) {
  // Laplace-smoothed rates keep the standard error positive at 0 and 1.
  const double trials = static_cast<double>(grid.spec.trials);
  const auto se = [&](double p) {
    const double q = (p * trials + 1.0) / (trials + 2.0);
    return std::sqrt(q * (1.0 - q) / trials);
  };
  std::size_t violations = 0;
  for (const auto& pd : grid.pd) {
    const std::size_t ns = pd.size();
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t k = 0; k < pd[s].size(); ++k) {
        // along n
        if (k + 1 < pd[s].size()) {
          const double tol = se_mult * std::hypot(se(pd[s][k]), se(pd[s][k + 1]));
          if (pd[s][k + 1] < pd[s][k] - tol) ++violations;
        }
        // along SBR
        if (s + 1 < ns) {
          const double tol = se_mult * std::hypot(se(pd[s][k]), se(pd[s + 1][k]));
          if (pd[s + 1][k] < pd[s][k] - tol) ++violations;
        }
      }
    }
  }
  return violations;
}

PfaCurve run_pfa_curve(const ExperimentSpec& spec_in) {
  ExperimentSpec spec = spec_in;
  spec.finalize_defaults();
  // Pulse centered mid-range: sigma up to T/100 sees no boundary truncation,
  // and detection is invariant to circular shifts so only the shape matters.
  const Irf irf = make_gaussian_irf(spec.T, spec.sigma, 0.5 * spec.T);
  PfaCurve curve;
  curve.spec = spec;
  curve.detectors = detectors_of(spec);
  const TrialRunner runner(spec, curve.detectors, irf);

  const std::size_t nn = spec.n_grid.size();
  curve.pfa.assign(curve.detectors.size(), std::vector<double>(nn, 0.0));
  std::vector<CellCounts> cells(nn);
  const SceneParams null = SceneParams::background();
  parallel_for(nn, spec.threads, [&](std::size_t k) {
    cells[k] = runner.run_cell(null, spec.n_grid[k]);
  });
  for (std::size_t k = 0; k < nn; ++k)
    for (std::size_t d = 0; d < curve.detectors.size(); ++d)
      curve.pfa[d][k] = static_cast<double>(cells[k].detections[d]) / spec.trials;
  return curve;
}

std::vector<LevelCurve> run_level_curves(const PdGrid& grid, double target_pd) {
  std::vector<LevelCurve> curves;
  for (std::size_t d = 0; d < grid.detectors.size(); ++d) {
    LevelCurve c;
    c.detector = grid.detectors[d];
    c.sbr = grid.spec.sbr_grid;
    c.n_required.assign(c.sbr.size(), -1);
    for (std::size_t s = 0; s < c.sbr.size(); ++s) {
      double running = 0.0;  // running max smooths Monte Carlo dips
      for (std::size_t k = 0; k < grid.spec.n_grid.size(); ++k) {
        running = std::max(running, grid.pd[d][s][k]);
        if (running >= target_pd) {
          c.n_required[s] = grid.spec.n_grid[k];
          break;
        }
      }
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

Scene make_synthetic_scene(const SceneSpec& spec, const Irf& irf) {
  if (irf.T() != spec.T)
    throw std::invalid_argument("make_synthetic_scene: pulse length must equal T");
  if (spec.width == 0 || spec.height == 0)
    throw std::invalid_argument("make_synthetic_scene: empty scene");
  const double depth = spec.depth < 0.0 ? 0.5 * spec.T : spec.depth;

  Scene scene;
  scene.width = spec.width;
  scene.height = spec.height;
  scene.T = spec.T;
  const std::size_t count = static_cast<std::size_t>(spec.width) * spec.height;
  scene.truth.assign(count, 0);
  scene.pixels.resize(count);

  const double cx = 0.5 * (spec.width - 1);
  const double cy = 0.5 * (spec.height - 1);
  const double extent = 0.5 * spec.shape_scale * std::min(spec.width, spec.height);
  std::vector<double> rim_dist(count, 0.0);  // 0 at rim, 1 at center
  for (std::uint32_t yy = 0; yy < spec.height; ++yy) {
    for (std::uint32_t xx = 0; xx < spec.width; ++xx) {
      const std::size_t k = static_cast<std::size_t>(yy) * spec.width + xx;
      const double dx = xx - cx, dy = yy - cy;
      bool inside;
      double frac;  // normalized distance from center, 1 at the rim
      if (spec.shape == "rect") {
        frac = std::max(std::abs(dx), std::abs(dy)) / extent;
        inside = frac <= 1.0;
      } else {
        frac = std::hypot(dx, dy) / extent;
        inside = frac <= 1.0;
      }
      if (inside) {
        scene.truth[k] = 1;
        rim_dist[k] = 1.0 - frac;
      }
    }
  }

  // Radial reflectivity: bright center falling off geometrically to the rim,
  // normalized so the surface-pixel mean stays at mean_photons.
  std::vector<double> gain(count, 1.0);
  if (spec.reflectivity == "radial" && spec.reflectivity_range > 1.0) {
    double total = 0.0;
    std::size_t fg = 0;
    for (std::size_t k = 0; k < count; ++k) {
      if (!scene.truth[k]) continue;
      gain[k] = std::pow(spec.reflectivity_range, rim_dist[k] - 1.0);
      total += gain[k];
      ++fg;
    }
    const double norm = fg > 0 ? static_cast<double>(fg) / total : 1.0;
    for (std::size_t k = 0; k < count; ++k)
      if (scene.truth[k]) gain[k] *= norm;
  }

  const SceneParams fg_theta = SceneParams::from_sbr(spec.sbr, depth);
  const SceneParams bg_theta = SceneParams::background();
  const MixtureSampler fg_sampler(fg_theta, irf, spec.T);
  const MixtureSampler bg_sampler(bg_theta, irf, spec.T);

  parallel_for(count, spec.threads, [&](std::size_t k) {
    Rng rng = Rng::substream(spec.seed, k);
    const double mean = spec.mean_photons * (scene.truth[k] ? gain[k] : 1.0);
    const std::uint32_t n =
        spec.poisson_counts ? rng.poisson(mean)
                            : static_cast<std::uint32_t>(std::llround(mean));
    std::vector<std::uint32_t> ts(n);
    const MixtureSampler& sampler = scene.truth[k] ? fg_sampler : bg_sampler;
    for (std::uint32_t i = 0; i < n; ++i) ts[i] = sampler.sample(rng);
    scene.pixels[k] = PhotonStream(std::move(ts), spec.T);
  });
  return scene;
}

}  // namespace sketchlidar
