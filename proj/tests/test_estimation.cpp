#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sketchlidar/estimation.hpp"
#include "sketchlidar/pipeline.hpp"
#include "sketchlidar/rng.hpp"
#include "sketchlidar/simulator.hpp"

using namespace sketchlidar;

namespace {

Sketch model_sketch(const SceneParams& theta, const Irf& irf, const FrequencyGrid& grid,
                    std::uint64_t n) {
  Sketch s;
  s.n = n;
  s.z = model_cf(theta, irf_transform(irf, grid), grid).psi;
  return s;
}

Sketch simulated_sketch(const MixtureSampler& sampler, const FrequencyGrid& grid,
                        std::uint32_t n, Rng& rng) {
  SketchAccumulator acc(grid);
  for (std::uint32_t i = 0; i < n; ++i) acc.update(sampler.sample(rng));
  return acc.finalize();
}

double circular_error(double a, double b, double T) {
  double d = std::fmod(std::abs(a - b), T);
  return std::min(d, T - d);
}

}  // namespace

TEST_CASE("closed form inverts the noiseless model") {
  const std::uint32_t T = 5000;
  const Irf irf = make_gaussian_irf(T, 50.0, 0.0);

  SUBCASE("interior alpha and fractional depth") {
    const FrequencyGrid grid(1, T);
    const Sketch s = model_sketch(SceneParams::single_surface(0.6, 1234.5), irf, grid, 1000);
    const auto e = closed_form_single(s, irf_transform(irf, grid), grid);
    CHECK(e.t_hat == doctest::Approx(1234.5).epsilon(1e-9));
    CHECK(e.alpha_hat == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(e.converged);
  }

  SUBCASE("pure pulse at depth zero") {
    const FrequencyGrid grid(3, T);
    const auto irf_hat = irf_transform(irf, grid);
    Sketch s;
    s.n = 10;
    s.z = {irf_hat[0], irf_hat[1], irf_hat[2]};
    const auto e = closed_form_single(s, irf_hat, grid);
    CHECK(std::abs(e.t_hat) < 1e-9);
    CHECK(e.alpha_hat == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("alpha clamps at one") {
    const FrequencyGrid grid(1, T);
    const auto irf_hat = irf_transform(irf, grid);
    Sketch s;
    s.n = 4;
    s.z = {irf_hat[0] * 1.5};
    CHECK(closed_form_single(s, irf_hat, grid).alpha_hat == 1.0);
  }

  SUBCASE("uniform pulse is unidentifiable at the first frequency") {
    const Irf flat(std::vector<double>(T, 1.0));
    const FrequencyGrid grid(1, T);
    Sketch s;
    s.n = 5;
    s.z = {{0.1, 0.1}};
    CHECK_THROWS_AS(closed_form_single(s, irf_transform(flat, grid), grid),
                    std::invalid_argument);
  }

  SUBCASE("positive rescaling of z leaves the depth unchanged") {
    const FrequencyGrid grid(1, T);
    const Sketch s = model_sketch(SceneParams::single_surface(0.8, 777.25), irf, grid, 100);
    Sketch scaled = s;
    for (auto& z : scaled.z) z *= 0.42;  // extra background photons only rescale
    const auto a = closed_form_single(s, irf_transform(irf, grid), grid);
    const auto b = closed_form_single(scaled, irf_transform(irf, grid), grid);
    CHECK(a.t_hat == doctest::Approx(b.t_hat).epsilon(1e-12));
  }
}

TEST_CASE("closed form error against its asymptotic scale") {
  // Delta-method oracle for the first-frequency phase estimator: the depth
  // error std is sqrt(Var(sin w1 (x - t)) / n) / (alpha |hhat_1| w1).
  const std::uint32_t T = 5000, n = 10000, trials = 1000;
  const double sigma = 50.0, alpha = 0.8, t_true = 2000.0;
  const Irf irf = make_gaussian_irf(T, sigma, 0.0);
  const FrequencyGrid grid(1, T);
  const auto irf_hat = irf_transform(irf, grid);
  const SceneParams theta = SceneParams::single_surface(alpha, t_true);

  // Var(sin w1 (x - t)) = (1 - Re Psi(2 w1) at t = 0) / 2 under the mixture.
  const auto spectrum = irf_spectrum(irf, 2);
  const double var_sin = 0.5 * (1.0 - alpha * spectrum[2].real());
  const double std_t =
      std::sqrt(var_sin / n) / (alpha * std::abs(spectrum[1]) * grid.omega(1));

  const MixtureSampler sampler(theta, irf, T);
  std::uint32_t within = 0;
  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::substream(600, trial);
    const Sketch s = simulated_sketch(sampler, grid, n, rng);
    const auto e = closed_form_single(s, irf_hat, grid);
    if (circular_error(e.t_hat, t_true, T) <= 3.0 * std_t) ++within;
  }
  CHECK(static_cast<double>(within) / trials >= 0.95);
}

TEST_CASE("matched filter initializer") {
  const std::uint32_t T = 5000;
  const Irf irf = make_gaussian_irf(T, 50.0, 0.0);

  SUBCASE("noiseless peak lands within one grid cell") {
    const FrequencyGrid grid(10, T);
    const auto irf_hat = irf_transform(irf, grid);
    const double t_true = 3141.0;
    const Sketch s = model_sketch(SceneParams::single_surface(0.7, t_true), irf, grid, 100);
    const std::uint32_t points = 512;
    const auto e = matched_filter_init(s, irf_hat, grid, points);
    CHECK(circular_error(e.t_hat, t_true, T) <= static_cast<double>(T) / points);
    CHECK(e.alpha_hat == doctest::Approx(0.7).epsilon(0.05));
    CHECK_FALSE(e.degenerate);
  }

  SUBCASE("zero sketch is degenerate") {
    const FrequencyGrid grid(4, T);
    Sketch s;
    s.n = 50;
    s.z.assign(4, {0.0, 0.0});
    const auto e = matched_filter_init(s, irf_transform(irf, grid), grid, 64);
    CHECK(e.degenerate);
    CHECK(e.t_hat == 0.0);
    CHECK(e.alpha_hat == 0.0);
  }

  SUBCASE("two frequencies disambiguate the half-period alias everywhere") {
    // With only the second frequency, depths t and t + T/2 are aliases; the
    // initializer over m = 2 must always pick the true one. Exhaustive over
    // every integer depth of a small histogram.
    const std::uint32_t Ts = 1000;
    const Irf irf_s = make_gaussian_irf(Ts, 10.0, 0.0);
    const FrequencyGrid grid(2, Ts);
    const auto irf_hat = irf_transform(irf_s, grid);
    for (std::uint32_t t = 0; t < Ts; ++t) {
      const Sketch s =
          model_sketch(SceneParams::single_surface(0.9, static_cast<double>(t)), irf_s, grid, 10);
      const auto e = matched_filter_init(s, irf_hat, grid, 500);
      const double err_true = circular_error(e.t_hat, t, Ts);
      const double err_alias = circular_error(e.t_hat, t + Ts / 2.0, Ts);
      CHECK(err_true < err_alias);
    }
  }

  SUBCASE("grid point precondition") {
    const FrequencyGrid grid(8, T);
    Sketch s;
    s.n = 1;
    s.z.assign(8, {0.1, 0.0});
    CHECK_THROWS_AS(matched_filter_init(s, irf_transform(irf, grid), grid, 7),
                    std::invalid_argument);
  }
}

TEST_CASE("weighted refinement") {
  const std::uint32_t T = 5000;
  const Irf irf = make_gaussian_irf(T, 50.0, 0.0);

  SUBCASE("starting at the truth returns immediately with zero objective") {
    const FrequencyGrid grid(6, T);
    const SceneParams theta = SceneParams::single_surface(0.55, 987.0);
    const Sketch s = model_sketch(theta, irf, grid, 500);
    DepthEstimate init;
    init.t_hat = 987.0;
    init.alpha_hat = 0.55;
    const auto e = wls_refine(s, init, irf, grid, WeightMode::identity);
    CHECK(e.converged);
    CHECK(e.objective < 1e-18);
    CHECK(e.t_hat == doctest::Approx(987.0).epsilon(1e-10));
  }

  SUBCASE("m = 1 refinement reproduces the closed form") {
    const FrequencyGrid grid(1, T);
    const auto irf_hat = irf_transform(irf, grid);
    Rng rng(12);
    const MixtureSampler sampler(SceneParams::single_surface(0.5, 1500.0), irf, T);
    for (int rep = 0; rep < 10; ++rep) {
      const Sketch s = simulated_sketch(sampler, grid, 2000, rng);
      const auto closed = closed_form_single(s, irf_hat, grid);
      if (closed.alpha_hat >= 0.999) continue;  // clamped case has no interior solution
      const auto refined = wls_refine(s, closed, irf, grid, WeightMode::identity);
      CHECK(circular_error(refined.t_hat, closed.t_hat, T) < 1e-6);
      CHECK(refined.alpha_hat == doctest::Approx(closed.alpha_hat).epsilon(1e-6));
    }
  }

  SUBCASE("refined errors beat the closed form on average") {
    const std::uint32_t m = 10, n = 1000, trials = 1000;
    const FrequencyGrid grid(m, T);
    const FrequencyGrid grid1(1, T);
    const auto irf_hat = irf_transform(irf, grid);
    const auto irf_hat1 = irf_transform(irf, grid1);
    const double t_true = 2750.0;
    const SceneParams theta = SceneParams::from_sbr(1.0, t_true);
    const MixtureSampler sampler(theta, irf, T);

    double se_closed = 0.0, se_refined = 0.0;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
      Rng rng = Rng::substream(601, trial);
      const Sketch s = simulated_sketch(sampler, grid, n, rng);
      Sketch s1;
      s1.n = s.n;
      s1.z = {s.z[0]};
      const auto closed = closed_form_single(s1, irf_hat1, grid1);
      const auto init = matched_filter_init(s, irf_hat, grid, 128);
      const auto refined = wls_refine(s, init, irf, grid, WeightMode::plugin_covariance);
      se_closed += std::pow(circular_error(closed.t_hat, t_true, T), 2);
      se_refined += std::pow(circular_error(refined.t_hat, t_true, T), 2);
    }
    const double rmse_closed = std::sqrt(se_closed / trials);
    const double rmse_refined = std::sqrt(se_refined / trials);
    CHECK(rmse_refined <= rmse_closed);
  }

  SUBCASE("refinement never worsens the identity objective") {
    const FrequencyGrid grid(8, T);
    const auto irf_hat = irf_transform(irf, grid);
    Rng rng(14);
    const MixtureSampler sampler(SceneParams::from_sbr(0.8, 3100.0), irf, T);
    for (int rep = 0; rep < 20; ++rep) {
      const Sketch s = simulated_sketch(sampler, grid, 300, rng);
      const auto init = matched_filter_init(s, irf_hat, grid, 96);
      const auto refined = wls_refine(s, init, irf, grid, WeightMode::identity);
      CHECK(refined.objective >= 0.0);
      CHECK(refined.objective <= init.objective + 1e-12);
    }
  }

  SUBCASE("singular covariance falls back to identity weights") {
    // A pure delta pulse at full signal strength has a deterministic sketch,
    // so the plug-in covariance is singular.
    std::vector<double> h(T, 0.0);
    h[0] = 1.0;
    const Irf delta(h);
    const FrequencyGrid grid(3, T);
    const Sketch s = model_sketch(SceneParams::single_surface(1.0, 42.0), delta, grid, 100);
    DepthEstimate init;
    init.t_hat = 42.0;
    init.alpha_hat = 1.0;
    const auto e = wls_refine(s, init, delta, grid, WeightMode::plugin_covariance);
    CHECK(e.weight_fallback);
    CHECK(circular_error(e.t_hat, 42.0, T) < 1e-6);
  }
}

TEST_CASE("circular consistency of the full estimator") {
  const std::uint32_t T = 5000;
  const Irf irf = make_gaussian_irf(T, 50.0, 0.0);
  const FrequencyGrid grid(8, T);
  EstimateConfig cfg;
  cfg.detection.beta = 0.05;

  const double t0 = 4321.0;
  for (double delta : {500.0, 2500.0, 4000.0}) {
    const Sketch a = model_sketch(SceneParams::single_surface(0.6, t0), irf, grid, 400);
    const Sketch b = model_sketch(
        SceneParams::single_surface(0.6, std::fmod(t0 + delta, T)), irf, grid, 400);
    const auto ea = estimate_pixel(a, irf, grid, cfg);
    const auto eb = estimate_pixel(b, irf, grid, cfg);
    REQUIRE(ea.has_value());
    REQUIRE(eb.has_value());
    CHECK(circular_error(eb->t_hat, ea->t_hat + delta, T) < 1e-6);
  }
}

TEST_CASE("per-pixel estimation pipeline") {
  const std::uint32_t T = 2700;
  const Irf irf = make_gaussian_irf(T, 27.0, 0.0);
  const FrequencyGrid grid(5, T);
  EstimateConfig cfg;
  cfg.detection.beta = 0.05;

  SUBCASE("background pixels are mostly skipped") {
    const std::uint32_t trials = 200;
    std::uint32_t skipped = 0;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
      Rng rng = Rng::substream(700, trial);
      SketchAccumulator acc(grid);
      for (int i = 0; i < 1000; ++i) acc.update(rng.next_below(T));
      if (!estimate_pixel(acc.finalize(), irf, grid, cfg)) ++skipped;
    }
    CHECK(static_cast<double>(skipped) / trials >= 0.90);
  }

  SUBCASE("strong pixels are estimated nearly always near the truth") {
    const std::uint32_t trials = 200;
    const double t_true = 1350.0;
    const MixtureSampler sampler(SceneParams::from_sbr(0.29, t_true), irf, T);
    std::uint32_t produced = 0;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
      Rng rng = Rng::substream(701, trial);
      const Sketch s = simulated_sketch(sampler, grid, 900, rng);
      const auto e = estimate_pixel(s, irf, grid, cfg);
      if (e) {
        ++produced;
        CHECK(circular_error(e->t_hat, t_true, T) < 100.0);
        CHECK(e->alpha_hat >= 0.0);
        CHECK(e->alpha_hat <= 1.0);
      }
    }
    CHECK(static_cast<double>(produced) / trials >= 0.90);
  }

  SUBCASE("insufficient pixels yield no estimate") {
    Sketch s;
    s.n = 3;
    s.z.assign(5, {0.9, 0.0});
    CHECK_FALSE(estimate_pixel(s, irf, grid, cfg).has_value());
  }

  SUBCASE("scene estimation equals the sequential per-pixel pipeline") {
    SceneSpec spec;
    spec.width = 24;
    spec.height = 16;
    spec.T = T;
    spec.sigma = 27.0;
    spec.mean_photons = 200.0;
    spec.sbr = 2.0;
    spec.seed = 5;
    spec.reflectivity = "uniform";
    const Scene scene = make_synthetic_scene(spec, irf);
    const SketchImage image = sketch_scene(scene, grid, 2);

    const auto parallel = estimate_scene(image, irf, cfg, 2);
    const auto spectrum = irf_spectrum(irf, grid.m());
    for (std::size_t k = 0; k < image.pixels.size(); ++k) {
      const auto seq = estimate_pixel(image.pixels[k], spectrum, grid, cfg);
      CHECK(parallel[k].has_value() == seq.has_value());
      if (seq && parallel[k]) {
        CHECK(parallel[k]->t_hat == seq->t_hat);
        CHECK(parallel[k]->alpha_hat == seq->alpha_hat);
      }
    }
  }
}
