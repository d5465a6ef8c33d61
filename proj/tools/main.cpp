#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sketchlidar/baselines.hpp"
#include "sketchlidar/detection.hpp"
#include "sketchlidar/estimation.hpp"
#include "sketchlidar/io.hpp"
#include "sketchlidar/parallel.hpp"
#include "sketchlidar/pipeline.hpp"
#include "sketchlidar/simulator.hpp"

namespace sl = sketchlidar;
using nlohmann::json;

namespace {

sl::StatisticMode parse_dof_mode(const std::string& s) {
  if (s == "scaled2m") return sl::StatisticMode::scaled_2m;
  if (s == "raw") return sl::StatisticMode::raw_ecf;
  throw CLI::ValidationError("--dof-mode", "expected scaled2m or raw");
}

sl::ExperimentSpec experiment_from_json(const json& j) {
  sl::ExperimentSpec spec;
  spec.T = j.value("T", spec.T);
  spec.sigma = j.value("sigma", spec.T / 100.0);
  spec.depth = j.value("depth", -1.0);
  spec.trials = j.value("trials", spec.trials);
  spec.beta = j.value("beta", spec.beta);
  spec.seed = j.value("seed", spec.seed);
  spec.poisson_counts = j.value("poisson_counts", spec.poisson_counts);
  spec.threads = j.value("threads", 0u);
  if (j.contains("sketch_sizes")) spec.sketch_sizes = j["sketch_sizes"].get<std::vector<std::uint32_t>>();
  if (j.contains("hist_bins")) spec.hist_bins = j["hist_bins"].get<std::vector<std::uint32_t>>();
  spec.include_ks = j.value("include_ks", false);
  if (j.contains("sbr_grid")) spec.sbr_grid = j["sbr_grid"].get<std::vector<double>>();
  if (j.contains("n_grid")) spec.n_grid = j["n_grid"].get<std::vector<std::uint32_t>>();
  spec.finalize_defaults();
  return spec;
}

sl::SceneSpec scene_from_json(const json& j) {
  sl::SceneSpec s;
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.T = j.value("T", s.T);
  s.sigma = j.value("sigma", s.T / 100.0);
  s.shape = j.value("shape", s.shape);
  s.shape_scale = j.value("shape_scale", s.shape_scale);
  s.sbr = j.value("sbr", s.sbr);
  s.depth = j.value("depth", -1.0);
  s.mean_photons = j.value("mean_photons", s.mean_photons);
  s.reflectivity = j.value("reflectivity", s.reflectivity);
  s.reflectivity_range = j.value("reflectivity_range", s.reflectivity_range);
  s.poisson_counts = j.value("poisson_counts", true);
  s.seed = j.value("seed", s.seed);
  s.threads = j.value("threads", 0u);
  return s;
}

std::string spec_prefix_header() {
  return "detector,T,sigma,depth,beta,trials,seed,poisson_counts";
}

std::string spec_prefix(const sl::ExperimentSpec& spec, const std::string& detector) {
  std::string row = detector;
  row += ',' + std::to_string(spec.T);
  row += ',' + sl::csv_double(spec.sigma);
  row += ',' + sl::csv_double(spec.depth);
  row += ',' + sl::csv_double(spec.beta);
  row += ',' + std::to_string(spec.trials);
  row += ',' + std::to_string(spec.seed);
  row += ',' + std::string(spec.poisson_counts ? "1" : "0");
  return row;
}

void write_pd_grid_csv(const std::filesystem::path& path, const sl::PdGrid& grid) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sl::DataError("cannot open " + path.string());
  out << spec_prefix_header() << ",sbr,n,pd\n";
  for (std::size_t d = 0; d < grid.detectors.size(); ++d) {
    const std::string prefix = spec_prefix(grid.spec, grid.detectors[d].name());
    for (std::size_t s = 0; s < grid.spec.sbr_grid.size(); ++s)
      for (std::size_t k = 0; k < grid.spec.n_grid.size(); ++k)
        out << prefix << ',' << sl::csv_double(grid.spec.sbr_grid[s]) << ','
            << grid.spec.n_grid[k] << ',' << sl::csv_double(grid.pd[d][s][k]) << '\n';
  }
}

void write_pfa_csv(const std::filesystem::path& path, const sl::PfaCurve& curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sl::DataError("cannot open " + path.string());
  out << spec_prefix_header() << ",n,pfa\n";
  for (std::size_t d = 0; d < curve.detectors.size(); ++d) {
    const std::string prefix = spec_prefix(curve.spec, curve.detectors[d].name());
    for (std::size_t k = 0; k < curve.spec.n_grid.size(); ++k)
      out << prefix << ',' << curve.spec.n_grid[k] << ',' << sl::csv_double(curve.pfa[d][k])
          << '\n';
  }
}

void write_level_csv(const std::filesystem::path& path, const sl::PdGrid& grid,
                     const std::vector<sl::LevelCurve>& curves, double target) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sl::DataError("cannot open " + path.string());
  out << spec_prefix_header() << ",target_pd,sbr,n_required\n";
  for (const auto& c : curves) {
    const std::string prefix = spec_prefix(grid.spec, c.detector.name());
    for (std::size_t s = 0; s < c.sbr.size(); ++s)
      out << prefix << ',' << sl::csv_double(target) << ',' << sl::csv_double(c.sbr[s]) << ','
          << c.n_required[s] << '\n';  // -1 marks SBRs that never reach the target
  }
}

void write_detect_csv(const std::filesystem::path& path, const sl::SketchImage& image,
                      const sl::SceneDetection& det) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw sl::DataError("cannot open " + path.string());
  out << "pixel_x,pixel_y,n,statistic,threshold,label,map\n";
  for (std::uint32_t y = 0; y < image.height; ++y) {
    for (std::uint32_t x = 0; x < image.width; ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * image.width + x;
      out << x << ',' << y << ',' << image.pixels[k].n << ','
          << sl::csv_double(det.stats.values[k]) << ',' << sl::csv_double(det.threshold) << ','
          << static_cast<int>(det.labels[k]) << ',' << static_cast<int>(det.map.v[k]) << '\n';
    }
  }
}

int cmd_sketch(const std::string& input, const std::string& output, std::uint32_t m) {
  std::size_t resident = 0;
  const sl::SketchImage image = sl::sketch_photon_file(input, m, &resident);
  sl::write_sketch_file(output, image);
  const auto in_bytes = std::filesystem::file_size(input);
  const auto out_bytes = std::filesystem::file_size(output);
  std::printf("sketched %ux%u pixels, m=%u, T=%u\n", image.width, image.height, image.m, image.T);
  std::printf("compression ratio: %.6g (%llu -> %llu bytes)\n",
              static_cast<double>(in_bytes) / static_cast<double>(out_bytes),
              static_cast<unsigned long long>(in_bytes),
              static_cast<unsigned long long>(out_bytes));
  return 0;
}

struct DetectFlags {
  double beta = 0.05;
  std::string dof_mode = "scaled2m";
  std::uint64_t min_photons = 5;
  double tv_tau = 0.0;
  std::uint32_t tv_iters = 200;
  double tv_tol = 1e-6;
  std::string baseline;  ///< "", "hist" or "ks" (full-data detectors)
  std::uint32_t coarse_bins = 50;
  unsigned threads = 0;
};

void report_map(const std::vector<sl::PixelLabel>& labels, double threshold) {
  std::size_t surface = 0, insufficient = 0;
  for (auto l : labels) {
    if (l == sl::PixelLabel::surface) ++surface;
    if (l == sl::PixelLabel::insufficient) ++insufficient;
  }
  std::printf("pixels: %zu, surface: %zu, insufficient: %zu, threshold: %.6g\n", labels.size(),
              surface, insufficient, threshold);
}

// Full-data reference detectors over a photon file. The K-S threshold varies
// with the pixel photon count, so the statistic image holds the shifted value
// statistic - threshold and the map thresholds it at zero.
int cmd_detect_baseline(const std::string& input, const DetectFlags& flags,
                        const std::string& map_path, const std::string& csv_path) {
  const sl::PhotonFrame frame = sl::read_photon_file(input);
  const bool use_ks = flags.baseline == "ks";
  if (!use_ks && flags.baseline != "hist")
    throw sl::DataError("detect: --baseline must be hist or ks");

  const std::size_t count = frame.pixels.size();
  std::vector<sl::PixelLabel> labels(count, sl::PixelLabel::background);
  std::vector<sl::DetectionResult> results(count);
  sl::StatImage shifted;
  shifted.width = frame.width;
  shifted.height = frame.height;
  shifted.values.assign(count, 0.0);
  shifted.mask.assign(count, 1);

  const std::uint64_t min_photons = std::max<std::uint64_t>(flags.min_photons, use_ks ? 2 : 1);
  sl::parallel_for(count, flags.threads, [&](std::size_t k) {
    const auto& px = frame.pixels[k];
    if (px.n() < min_photons) {
      labels[k] = sl::PixelLabel::insufficient;
      shifted.mask[k] = 0;
      return;
    }
    results[k] = use_ks ? sl::ks_interarrival_test(px, flags.beta)
                        : sl::coarse_hist_test(px, flags.coarse_bins, flags.beta);
    labels[k] = results[k].reject_h0 ? sl::PixelLabel::surface : sl::PixelLabel::background;
    shifted.values[k] = results[k].statistic - results[k].threshold;
  });

  sl::TvOptions tv{flags.tv_tol, flags.tv_iters};
  const sl::DetectionMap map = sl::detection_map(shifted, 0.0, flags.tv_tau, tv);
  if (!map_path.empty()) sl::write_pgm(map_path, map);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw sl::DataError("cannot open " + csv_path);
    out << "pixel_x,pixel_y,n,statistic,threshold,label,map\n";
    for (std::uint32_t y = 0; y < frame.height; ++y) {
      for (std::uint32_t x = 0; x < frame.width; ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * frame.width + x;
        out << x << ',' << y << ',' << frame.pixels[k].n() << ','
            << sl::csv_double(results[k].statistic) << ','
            << sl::csv_double(results[k].threshold) << ',' << static_cast<int>(labels[k]) << ','
            << static_cast<int>(map.v[k]) << '\n';
      }
    }
  }
  report_map(labels, 0.0);
  return 0;
}

int cmd_detect(const std::string& input, const DetectFlags& flags, const std::string& map_path,
               const std::string& csv_path) {
  if (!flags.baseline.empty()) return cmd_detect_baseline(input, flags, map_path, csv_path);
  const sl::SketchImage image = sl::read_sketch_file(input);
  sl::DetectionConfig cfg;
  cfg.beta = flags.beta;
  cfg.mode = parse_dof_mode(flags.dof_mode);
  cfg.min_photons = flags.min_photons;
  sl::TvOptions tv{flags.tv_tol, flags.tv_iters};
  const sl::SceneDetection det = sl::detect_scene(image, cfg, flags.tv_tau, tv, flags.threads);
  if (!map_path.empty()) sl::write_pgm(map_path, det.map);
  if (!csv_path.empty()) write_detect_csv(csv_path, image, det);
  report_map(det.labels, det.threshold);
  return 0;
}

int cmd_estimate(const std::string& input, const std::string& irf_file, double irf_sigma,
                 const DetectFlags& flags, const std::string& weights_mode,
                 const std::string& output) {
  const sl::SketchImage image = sl::read_sketch_file(input);
  std::optional<sl::Irf> irf;
  if (!irf_file.empty()) {
    irf = sl::read_irf_file(irf_file);
    if (irf->T() != image.T)
      throw sl::DataError("estimate: pulse file length " + std::to_string(irf->T()) +
                          " does not match sketch T " + std::to_string(image.T));
  } else if (irf_sigma > 0.0) {
    irf = sl::make_gaussian_irf(image.T, irf_sigma, 0.0);
  } else {
    throw sl::DataError("estimate: supply --irf FILE or --irf-gaussian-sigma SIGMA");
  }

  sl::EstimateConfig cfg;
  cfg.detection.beta = flags.beta;
  cfg.detection.mode = parse_dof_mode(flags.dof_mode);
  cfg.detection.min_photons = flags.min_photons;
  cfg.weights = weights_mode == "identity" ? sl::WeightMode::identity
                                           : sl::WeightMode::plugin_covariance;
  const auto estimates = sl::estimate_scene(image, *irf, cfg, flags.threads);

  std::ofstream out(output, std::ios::trunc);
  if (!out) throw sl::DataError("cannot open " + output);
  out << "pixel_x,pixel_y,detected,t_hat,alpha_hat,statistic\n";
  std::size_t detected = 0;
  for (std::uint32_t y = 0; y < image.height; ++y) {
    for (std::uint32_t x = 0; x < image.width; ++x) {
      const std::size_t k = static_cast<std::size_t>(y) * image.width + x;
      const auto& e = estimates[k];
      const auto& s = image.pixels[k];
      const double stat =
          s.n > 0 ? sl::test_statistic(s, cfg.detection.mode) : 0.0;
      out << x << ',' << y << ',' << (e ? 1 : 0) << ',';
      if (e) {
        ++detected;
        out << sl::csv_double(e->t_hat) << ',' << sl::csv_double(e->alpha_hat);
      } else {
        out << ',';
      }
      out << ',' << sl::csv_double(stat) << '\n';
    }
  }
  std::printf("estimated %zu of %zu pixels\n", detected, estimates.size());
  return 0;
}

int cmd_simulate(const std::string& spec_path, const std::string& out_dir) {
  std::ifstream in(spec_path);
  if (!in) throw sl::DataError("simulate: cannot open " + spec_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw sl::DataError(std::string("simulate: bad JSON: ") + e.what());
  }
  const std::string mode = j.value("mode", "pd_grid");
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  if (mode == "pd_grid") {
    const auto grid = sl::run_pd_grid(experiment_from_json(j));
    write_pd_grid_csv(dir / "pd_grid.csv", grid);
    std::printf("wrote %s\n", (dir / "pd_grid.csv").c_str());
  } else if (mode == "pfa_curve") {
    const auto curve = sl::run_pfa_curve(experiment_from_json(j));
    write_pfa_csv(dir / "pfa_curve.csv", curve);
    std::printf("wrote %s\n", (dir / "pfa_curve.csv").c_str());
  } else if (mode == "level_curves") {
    const double target = j.value("target_pd", 0.95);
    const auto grid = sl::run_pd_grid(experiment_from_json(j));
    write_pd_grid_csv(dir / "pd_grid.csv", grid);
    const auto curves = sl::run_level_curves(grid, target);
    write_level_csv(dir / "level_curves.csv", grid, curves, target);
    std::printf("wrote %s and %s\n", (dir / "pd_grid.csv").c_str(),
                (dir / "level_curves.csv").c_str());
  } else if (mode == "scene") {
    const sl::SceneSpec sspec = scene_from_json(j);
    const std::uint32_t m = j.value("m", 5u);
    const double beta = j.value("beta", 0.2);
    const double tv_tau = j.value("tv_tau", 8.0);
    const sl::Irf irf = sl::make_gaussian_irf(sspec.T, sspec.sigma, 0.0);
    const sl::Scene scene = sl::make_synthetic_scene(sspec, irf);
    const sl::FrequencyGrid grid(m, sspec.T);
    const sl::SketchImage image = sl::sketch_scene(scene, grid, sspec.threads);
    sl::DetectionConfig cfg;
    cfg.beta = beta;
    const auto plain = sl::detect_scene(image, cfg, 0.0, {}, sspec.threads);
    const auto tv = sl::detect_scene(image, cfg, tv_tau, {}, sspec.threads);
    sl::write_pgm(dir / "map.pgm", plain.map);
    sl::write_pgm(dir / "map_tv.pgm", tv.map);
    write_detect_csv(dir / "detect.csv", image, plain);

    std::ofstream out(dir / "summary.csv", std::ios::trunc);
    out << "m,beta,tv_tau,seed,pd,pfa,pd_tv,pfa_tv\n";
    out << m << ',' << sl::csv_double(beta) << ',' << sl::csv_double(tv_tau) << ',' << sspec.seed
        << ',' << sl::csv_double(sl::map_pd(plain.map, scene.truth)) << ','
        << sl::csv_double(sl::map_pfa(plain.map, scene.truth)) << ','
        << sl::csv_double(sl::map_pd(tv.map, scene.truth)) << ','
        << sl::csv_double(sl::map_pfa(tv.map, scene.truth)) << '\n';
    std::printf("wrote %s, %s, %s, %s\n", (dir / "map.pgm").c_str(), (dir / "map_tv.pgm").c_str(),
                (dir / "detect.csv").c_str(), (dir / "summary.csv").c_str());
  } else {
    throw sl::DataError("simulate: unknown mode " + mode);
  }
  return 0;
}

int cmd_bench(std::uint32_t T, double sigma, std::uint32_t m, double sbr, std::uint32_t n_low,
              std::uint32_t n_high, std::uint32_t pixels, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const sl::Irf irf = sl::make_gaussian_irf(T, sigma, 0.0);
  const sl::FrequencyGrid grid(m, T);
  const auto spectrum = sl::irf_spectrum(irf, m);
  const sl::SceneParams theta = sl::SceneParams::from_sbr(sbr, 0.5 * T);
  sl::EstimateConfig cfg;

  volatile double sink = 0.0;
  const auto run_case = [&](std::uint32_t n) {
    std::vector<sl::PhotonStream> streams(pixels);
    std::vector<sl::Sketch> sketches(pixels);
    for (std::uint32_t p = 0; p < pixels; ++p) {
      sl::Rng rng = sl::Rng::substream(seed, n, p);
      streams[p] = sl::sample_photons(theta, irf, T, n, rng);
      sketches[p] = sl::sketch_stream(streams[p], grid);
    }
    const auto t0 = clock::now();
    for (std::uint32_t p = 0; p < pixels; ++p) {
      const auto e = sl::estimate_pixel(sketches[p], spectrum, grid, cfg);
      if (e) sink = sink + e->t_hat;
    }
    const auto t1 = clock::now();
    for (std::uint32_t p = 0; p < pixels; ++p)
      sink = sink + sl::ks_interarrival_test(streams[p], 0.05).statistic;
    const auto t2 = clock::now();
    for (std::uint32_t p = 0; p < pixels; ++p)
      sink = sink + sl::coarse_hist_test(streams[p], 50, 0.05).statistic;
    const auto t3 = clock::now();
    const auto us = [&](auto a, auto b) {
      return std::chrono::duration<double, std::micro>(b - a).count() / pixels;
    };
    return std::array<double, 3>{us(t0, t1), us(t1, t2), us(t2, t3)};
  };

  const auto low = run_case(n_low);
  const auto high = run_case(n_high);
  const char* names[3] = {"detect+estimate from sketch", "K-S test on full data",
                          "coarse-histogram test on full data"};
  for (int i = 0; i < 3; ++i) {
    std::printf("per-pixel %s:\n", names[i]);
    std::printf("  n=%-8u %10.3f us\n", n_low, low[i]);
    std::printf("  n=%-8u %10.3f us   ratio %.3f\n", n_high, high[i], high[i] / low[i]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming characteristic-function sketches for single-photon lidar"};
  app.require_subcommand(1);

  // sketch
  std::string in_path, out_path;
  std::uint32_t sketch_m = 5;
  auto* sketch = app.add_subcommand("sketch", "Compress a photon file into per-pixel sketches");
  sketch->add_option("--input", in_path, "input .spld photon file")->required();
  sketch->add_option("--output", out_path, "output .skch sketch file")->required();
  sketch->add_option("--m", sketch_m, "sketch size (frequencies per pixel)")
      ->check(CLI::PositiveNumber);

  // detect
  DetectFlags dflags;
  std::string map_path, csv_path;
  auto* detect = app.add_subcommand(
      "detect", "Surface detection map from a sketch file (or a photon file with --baseline)");
  detect->add_option("--input", in_path, "input .skch sketch file (.spld with --baseline)")
      ->required();
  detect->add_option("--beta", dflags.beta, "significance level")->check(CLI::Range(1e-9, 1.0));
  detect->add_option("--dof-mode", dflags.dof_mode, "scaled2m or raw");
  detect->add_option("--min-photons", dflags.min_photons, "insufficient-data cutoff");
  detect->add_option("--tv-tau", dflags.tv_tau, "TV regularization weight (0 = off)");
  detect->add_option("--tv-iters", dflags.tv_iters, "TV iteration cap");
  detect->add_option("--tv-tol", dflags.tv_tol, "TV duality-gap tolerance");
  detect->add_option("--baseline", dflags.baseline, "full-data detector: hist or ks");
  detect->add_option("--coarse-bins", dflags.coarse_bins, "T_r for --baseline hist");
  detect->add_option("--threads", dflags.threads, "worker threads (0 = auto)");
  detect->add_option("--output-map", map_path, "binary PGM map output");
  detect->add_option("--output-csv", csv_path, "per-pixel CSV output");

  // estimate
  std::string irf_file, weights_mode = "plugin", est_out = "estimates.csv";
  double irf_sigma = 0.0;
  auto* estimate = app.add_subcommand("estimate", "Depth/intensity estimates from a sketch file");
  estimate->add_option("--input", in_path, "input .skch sketch file")->required();
  estimate->add_option("--irf", irf_file, "pulse shape file, one value per line");
  estimate->add_option("--irf-gaussian-sigma", irf_sigma, "Gaussian pulse width in bins");
  estimate->add_option("--beta", dflags.beta, "significance level");
  estimate->add_option("--dof-mode", dflags.dof_mode, "scaled2m or raw");
  estimate->add_option("--min-photons", dflags.min_photons, "insufficient-data cutoff");
  estimate->add_option("--weights", weights_mode, "identity or plugin");
  estimate->add_option("--threads", dflags.threads, "worker threads (0 = auto)");
  estimate->add_option("--output", est_out, "output CSV");

  // simulate
  std::string spec_path, out_dir = ".";
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo studies from a JSON spec");
  simulate->add_option("--spec", spec_path, "experiment JSON")->required();
  simulate->add_option("--output-dir", out_dir, "directory for CSV/PGM outputs");

  // bench
  std::uint32_t bench_T = 5000, bench_m = 10, bench_nlow = 100, bench_nhigh = 10000,
                bench_pixels = 256;
  double bench_sigma = 50.0, bench_sbr = 1.0;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "Per-pixel timing: sketch path vs full-data K-S");
  bench->add_option("--T", bench_T, "histogram length");
  bench->add_option("--sigma", bench_sigma, "Gaussian pulse width in bins");
  bench->add_option("--m", bench_m, "sketch size");
  bench->add_option("--sbr", bench_sbr, "signal-to-background ratio");
  bench->add_option("--n-low", bench_nlow, "photons per pixel, small case");
  bench->add_option("--n-high", bench_nhigh, "photons per pixel, large case");
  bench->add_option("--pixels", bench_pixels, "pixels per case");
  bench->add_option("--seed", bench_seed, "RNG seed");

  // ingest
  std::uint32_t width = 0, height = 0, T = 0, bin_width_ps = 0;
  bool skip_invalid = false;
  auto* ingest = app.add_subcommand("ingest", "Convert (x,y,timestamp) CSV to a photon file");
  ingest->add_option("--csv", in_path, "input CSV")->required();
  ingest->add_option("--width", width, "pixels per row")->required();
  ingest->add_option("--height", height, "pixel rows")->required();
  ingest->add_option("--T", T, "histogram length")->required();
  ingest->add_option("--bin-width-ps", bin_width_ps, "bin width in picoseconds");
  ingest->add_option("--output", out_path, "output .spld photon file")->required();
  ingest->add_flag("--skip-invalid", skip_invalid, "drop invalid rows instead of aborting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sketch->parsed()) return cmd_sketch(in_path, out_path, sketch_m);
    if (detect->parsed()) return cmd_detect(in_path, dflags, map_path, csv_path);
    if (estimate->parsed())
      return cmd_estimate(in_path, irf_file, irf_sigma, dflags, weights_mode, est_out);
    if (simulate->parsed()) return cmd_simulate(spec_path, out_dir);
    if (bench->parsed())
      return cmd_bench(bench_T, bench_sigma, bench_m, bench_sbr, bench_nlow, bench_nhigh,
                       bench_pixels, bench_seed);
    if (ingest->parsed()) {
      const auto frame = sl::ingest_csv(in_path, width, height, T, bin_width_ps, skip_invalid);
      sl::write_photon_file(out_path, frame);
      std::printf("wrote %s (%ux%u pixels, T=%u)\n", out_path.c_str(), width, height, T);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
