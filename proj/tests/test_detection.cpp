#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sketchlidar/detection.hpp"
#include "sketchlidar/gamma.hpp"
#include "sketchlidar/rng.hpp"
#include "sketchlidar/simulator.hpp"
#include "sketchlidar/sketch.hpp"

using namespace sketchlidar;

namespace {

// Quadrature oracle for the chi-squared CDF: adaptive Simpson on the density,
// sharing nothing with the incomplete-gamma implementation.
double chi2_pdf(double x, double k) {
  if (x <= 0.0) return 0.0;
  return std::exp((0.5 * k - 1.0) * std::log(x) - 0.5 * x - std::lgamma(0.5 * k) -
                  0.5 * k * std::log(2.0));
}

double simpson(double a, double b, double k) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (chi2_pdf(a, k) + 4.0 * chi2_pdf(m, k) + chi2_pdf(b, k));
}

double adaptive(double a, double b, double k, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double left = simpson(a, m, k), right = simpson(m, b, k);
  if (depth <= 0 || std::abs(left + right - whole) < 1e-12) return left + right;
  return adaptive(a, m, k, left, depth - 1) + adaptive(m, b, k, right, depth - 1);
}

double chi2_cdf_oracle(double x, double k) {
  if (x <= 0.0) return 0.0;
  // Closed forms where the density is singular or elementary; quadrature
  // handles the bounded densities.
  if (k == 1.0) return std::erf(std::sqrt(0.5 * x));
  if (k == 2.0) return 1.0 - std::exp(-0.5 * x);
  return adaptive(0.0, x, k, simpson(0.0, x, k), 48);
}

Sketch make_sketch(std::vector<std::complex<double>> z, std::uint64_t n) {
  Sketch s;
  s.z = std::move(z);
  s.n = n;
  return s;
}

Sketch uniform_trial_sketch(const FrequencyGrid& grid, std::uint32_t n, Rng& rng) {
  SketchAccumulator acc(grid);
  for (std::uint32_t i = 0; i < n; ++i) acc.update(rng.next_below(grid.T()));
  return acc.finalize();
}

}  // namespace

TEST_CASE("chi-squared upper percentiles") {
  // Frozen values checked against the quadrature oracle below.
  CHECK(chi2_upper_percentile(1, 0.5) == doctest::Approx(0.454936).epsilon(1e-3));
  CHECK(chi2_upper_percentile(2, 0.05) ==
        doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-9));
  CHECK(chi2_upper_percentile(20, 0.05) == doctest::Approx(31.410433).epsilon(1e-3));

  for (const auto& [dof, beta] : std::vector<std::pair<std::uint32_t, double>>{
           {1, 0.5}, {2, 0.05}, {20, 0.05}, {10, 0.2}, {99, 0.05}, {6, 0.01}, {3, 0.999}}) {
    const double q = chi2_upper_percentile(dof, beta);
    CHECK(chi2_cdf_oracle(q, dof) == doctest::Approx(1.0 - beta).epsilon(1e-7));
    CHECK(chi2_cdf(q, dof) == doctest::Approx(1.0 - beta).epsilon(1e-9));
  }

  // Extreme significance levels stay finite and consistent.
  const double near_zero = chi2_upper_percentile(10, 0.999999);
  CHECK(near_zero > 0.0);
  CHECK(chi2_cdf(near_zero, 10) == doctest::Approx(1e-6).epsilon(1e-6));
  CHECK(chi2_upper_percentile(10, 1e-9) > chi2_upper_percentile(10, 1e-3));

  CHECK_THROWS_AS(chi2_upper_percentile(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(chi2_upper_percentile(5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(chi2_upper_percentile(5, 1.0), std::invalid_argument);
}

TEST_CASE("test statistic scaling") {
  SUBCASE("zero sketch") {
    const Sketch s = make_sketch({{0.0, 0.0}, {0.0, 0.0}}, 10);
    CHECK(test_statistic(s, StatisticMode::scaled_2m) == 0.0);
    CHECK(test_statistic(s, StatisticMode::raw_ecf) == 0.0);
  }
  SUBCASE("single photon at unit modulus") {
    const Sketch s = make_sketch({{1.0, 0.0}}, 1);
    CHECK(test_statistic(s, StatisticMode::raw_ecf) == doctest::Approx(1.0));
    CHECK(test_statistic(s, StatisticMode::scaled_2m) == doctest::Approx(2.0));
  }
  SUBCASE("empty pixel") {
    const Sketch s = make_sketch({{0.0, 0.0}}, 0);
    CHECK_THROWS_AS(test_statistic(s, StatisticMode::scaled_2m), std::invalid_argument);
  }
}

TEST_CASE("null distribution of the scaled statistic") {
  const std::uint32_t T = 5000, m = 10, n = 1000, trials = 10000;
  const FrequencyGrid grid(m, T);
  std::vector<double> stats(trials);
  double mean = 0.0;
  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::substream(31, trial);
    const Sketch s = uniform_trial_sketch(grid, n, rng);
    stats[trial] = test_statistic(s, StatisticMode::scaled_2m);
    mean += stats[trial];
  }
  mean /= trials;
  CHECK(std::abs(mean - 20.0) < 0.5);

  std::sort(stats.begin(), stats.end());
  const double q95 = stats[static_cast<std::size_t>(0.95 * trials)];
  CHECK(std::abs(q95 - 31.410433) / 31.410433 < 0.03);
}

TEST_CASE("detect basics") {
  const DetectionConfig cfg;

  SUBCASE("zero sketch never rejects") {
    const Sketch s = make_sketch(std::vector<std::complex<double>>(5, {0.0, 0.0}), 100);
    for (double beta : {0.01, 0.05, 0.5, 0.999}) {
      DetectionConfig c = cfg;
      c.beta = beta;
      CHECK_FALSE(detect(s, c).reject_h0);
    }
  }

  SUBCASE("result invariant: rejection equals threshold crossing") {
    Rng rng(8);
    const FrequencyGrid grid(5, 500);
    for (int rep = 0; rep < 30; ++rep) {
      const Sketch s = uniform_trial_sketch(grid, 50 + rng.next_below(200), rng);
      const DetectionResult r = detect(s, cfg);
      CHECK(r.reject_h0 == (r.statistic > r.threshold));
    }
  }

  SUBCASE("shrinking beta never turns acceptance into rejection") {
    Rng rng(9);
    const FrequencyGrid grid(6, 800);
    const Sketch s = uniform_trial_sketch(grid, 300, rng);
    bool rejected = true;
    for (double beta : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
      DetectionConfig c = cfg;
      c.beta = beta;
      const bool now = detect(s, c).reject_h0;
      CHECK((!now || rejected));  // once acceptance appears it must persist
      rejected = now;
    }
  }

  SUBCASE("strong single-surface pixel is detected nearly always") {
    // 900 photons at SBR 0.29 with m = 5: detection should fire in at least
    // 95 percent of trials.
    const std::uint32_t T = 2700, m = 5, n = 900, trials = 400;
    const FrequencyGrid grid(m, T);
    const Irf irf = make_gaussian_irf(T, T / 100.0, 0.0);
    const SceneParams theta = SceneParams::from_sbr(0.29, 1350.0);
    const MixtureSampler sampler(theta, irf, T);
    DetectionConfig c;
    c.beta = 0.05;
    std::uint32_t hits = 0;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
      Rng rng = Rng::substream(13, trial);
      SketchAccumulator acc(grid);
      for (std::uint32_t i = 0; i < n; ++i) acc.update(sampler.sample(rng));
      if (detect(acc.finalize(), c).reject_h0) ++hits;
    }
    CHECK(static_cast<double>(hits) / trials >= 0.95);
  }
}

TEST_CASE("null calibration across beta, n and m") {
  const std::uint32_t T = 5000, trials = 3000;
  for (std::uint32_t m : {3u, 10u}) {
    const FrequencyGrid grid(m, T);
    for (std::uint32_t n : {100u, 1000u}) {
      std::vector<double> stats(trials);
      for (std::uint32_t trial = 0; trial < trials; ++trial) {
        Rng rng = Rng::substream(404, m, n, trial);
        stats[trial] =
            test_statistic(uniform_trial_sketch(grid, n, rng), StatisticMode::scaled_2m);
      }
      for (double beta : {0.05, 0.2}) {
        const double thr = chi2_upper_percentile(2 * m, beta);
        std::uint32_t rejects = 0;
        for (double s : stats)
          if (s > thr) ++rejects;
        const double pfa = static_cast<double>(rejects) / trials;
        const double band = 3.0 * std::sqrt(beta * (1.0 - beta) / trials);
        INFO("m=", m, " n=", n, " beta=", beta, " pfa=", pfa);
        CHECK(std::abs(pfa - beta) <= band);
      }
    }
  }
}

TEST_CASE("classify flags starved pixels") {
  DetectionConfig cfg;
  cfg.min_photons = 5;
  const Sketch starved = make_sketch({{0.5, 0.0}}, 4);
  CHECK(classify(starved, cfg) == PixelLabel::insufficient);
  const Sketch ok = make_sketch({{0.0, 0.0}}, 5);
  DetectionResult r;
  CHECK(classify(ok, cfg, &r) == PixelLabel::background);
  CHECK(r.statistic == 0.0);
}

TEST_CASE("background reference") {
  const std::uint32_t T = 100;
  const FrequencyGrid grid(4, T);

  SUBCASE("uniform distribution gives the zero reference") {
    const std::vector<double> pi(T, 1.0 / T);
    const auto zhat = background_reference(pi, grid);
    for (const auto& v : zhat) CHECK(std::abs(v) < 1e-12);
  }

  SUBCASE("point mass reference is a pure phase") {
    std::vector<double> pi(T, 0.0);
    pi[37] = 1.0;
    const auto zhat = background_reference(pi, grid);
    for (std::uint32_t j = 1; j <= 4; ++j)
      CHECK(std::abs(zhat[j - 1] - std::polar(1.0, grid.omega(j) * 37.0)) < 1e-12);
  }

  SUBCASE("linear ramp matches direct summation") {
    std::vector<double> pi(T);
    double total = 0.0;
    for (std::uint32_t t = 0; t < T; ++t) {
      pi[t] = 1.0 + static_cast<double>(t);
      total += pi[t];
    }
    for (auto& p : pi) p /= total;
    const auto zhat = background_reference(pi, grid);
    for (std::uint32_t j = 1; j <= 4; ++j) {
      std::complex<double> direct{0.0, 0.0};
      for (std::uint32_t t = 0; t < T; ++t)
        direct += pi[t] * std::complex<double>(std::cos(grid.omega(j) * t),
                                               std::sin(grid.omega(j) * t));
      CHECK(std::abs(zhat[j - 1] - direct) < 1e-12);
    }
  }

  SUBCASE("calibration stream reference is its sketch") {
    const PhotonStream cal({1, 5, 9, 22, 41}, T);
    const Sketch ref = background_reference(cal, grid);
    const Sketch direct = sketch_stream(cal, grid);
    CHECK(ref.n == direct.n);
    for (std::uint32_t j = 0; j < 4; ++j) CHECK(ref.z[j] == direct.z[j]);
    CHECK_THROWS_AS(background_reference(PhotonStream({}, T), grid), std::invalid_argument);
  }

  SUBCASE("invalid distributions") {
    std::vector<double> bad(T, 1.0 / T);
    bad[0] = -bad[0];
    CHECK_THROWS_AS(background_reference(bad, grid), std::invalid_argument);
    const std::vector<double> short_pi(T - 1, 1.0 / (T - 1));
    CHECK_THROWS_AS(background_reference(short_pi, grid), std::invalid_argument);
  }
}

TEST_CASE("data-driven background test") {
  const std::uint32_t T = 1000;
  const FrequencyGrid grid(5, T);
  DetectionConfig cfg;
  cfg.beta = 0.05;

  SUBCASE("matching reference never rejects") {
    Rng rng(55);
    const Sketch s = uniform_trial_sketch(grid, 200, rng);
    const DetectionResult r = detect_with_background(s, s.z, cfg);
    CHECK(r.statistic == 0.0);
    CHECK_FALSE(r.reject_h0);
  }

  SUBCASE("zero reference reduces to the plain test") {
    Rng rng(56);
    const Sketch s = uniform_trial_sketch(grid, 500, rng);
    const std::vector<std::complex<double>> zero(5, {0.0, 0.0});
    const DetectionResult a = detect_with_background(s, zero, cfg);
    const DetectionResult b = detect(s, cfg);
    CHECK(a.statistic == b.statistic);
    CHECK(a.reject_h0 == b.reject_h0);
  }

  SUBCASE("tilted background: corrected test lowers the false-alarm rate") {
    // pi(t) ramps linearly, 0.9/T at the first bin to 1.1/T at the last.
    std::vector<double> pi(T);
    for (std::uint32_t t = 0; t < T; ++t)
      pi[t] = (0.9 + 0.2 * static_cast<double>(t) / (T - 1)) / T;
    double total = 0.0;
    for (double p : pi) total += p;
    for (auto& p : pi) p /= total;
    std::vector<double> cdf(T);
    double c = 0.0;
    for (std::uint32_t t = 0; t < T; ++t) {
      c += pi[t];
      cdf[t] = c;
    }
    const auto zhat = background_reference(pi, grid);

    const std::uint32_t n = 1000, trials = 10000;
    std::uint32_t fa_plain = 0, fa_ref = 0;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
      Rng rng = Rng::substream(890, trial);
      SketchAccumulator acc(grid);
      for (std::uint32_t i = 0; i < n; ++i) {
        const double u = rng.next_double();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        acc.update(static_cast<std::uint32_t>(it - cdf.begin()));
      }
      const Sketch s = acc.finalize();
      if (detect(s, cfg).reject_h0) ++fa_plain;
      if (detect_with_background(s, zhat, cfg).reject_h0) ++fa_ref;
    }
    CHECK(fa_ref <= fa_plain);
  }

  SUBCASE("dimension mismatch") {
    Rng rng(57);
    const Sketch s = uniform_trial_sketch(grid, 100, rng);
    const std::vector<std::complex<double>> wrong(4, {0.0, 0.0});
    CHECK_THROWS_AS(detect_with_background(s, wrong, cfg), std::invalid_argument);
  }
}
