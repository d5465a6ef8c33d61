#include <doctest.h>

#include <cmath>
#include <complex>

#include "sketchlidar/core.hpp"

using namespace sketchlidar;

TEST_CASE("photon stream validates timestamps") {
  CHECK_NOTHROW(PhotonStream({0, 4, 2}, 5));
  CHECK_THROWS_AS(PhotonStream({5}, 5), std::out_of_range);
  CHECK_THROWS_AS(PhotonStream({0}, 1), std::invalid_argument);
  CHECK(PhotonStream({}, 2).n() == 0);
}

TEST_CASE("irf validation") {
  CHECK_THROWS_AS(Irf({1.0, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Irf({0.0, 0.0}), std::invalid_argument);
  const Irf irf({0.5, 1.5, 0.0});
  CHECK(irf.H == doctest::Approx(2.0));
  CHECK(irf.T() == 3);
}

TEST_CASE("gaussian irf shape") {
  const std::uint32_t T = 5000;
  const double sigma = 50.0;

  SUBCASE("mode at center zero") {
    const Irf irf = make_gaussian_irf(T, sigma, 0.0);
    for (std::uint32_t t = 1; t < T; ++t) CHECK(irf.h[0] >= irf.h[t]);
  }

  SUBCASE("symmetry about an interior center") {
    const Irf irf = make_gaussian_irf(T, sigma, 2500.0);
    CHECK(irf.H > 0.0);
    for (std::uint32_t d = 1; d <= 200; ++d)
      CHECK(irf.h[2500 - d] == doctest::Approx(irf.h[2500 + d]).epsilon(1e-12));
  }

  SUBCASE("mass within three sigma") {
    const Irf irf = make_gaussian_irf(T, sigma, 2500.0);
    double mass = 0.0;
    for (std::uint32_t t = 2500 - 150; t <= 2500 + 150; ++t) mass += irf.h[t];
    CHECK(mass / irf.H >= 0.99);
  }

  SUBCASE("parameter errors") {
    CHECK_THROWS_AS(make_gaussian_irf(T, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_gaussian_irf(T, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_gaussian_irf(1, 10.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("frequency grid") {
  const FrequencyGrid grid(10, 5000);
  CHECK(grid.omega(1) == doctest::Approx(kTwoPi / 5000.0));
  for (std::uint32_t j = 2; j <= 10; ++j) CHECK(grid.omega(j) > grid.omega(j - 1));
  CHECK_THROWS_AS(FrequencyGrid(0, 100), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(100, 100), std::invalid_argument);
  CHECK_NOTHROW(FrequencyGrid(99, 100));
}

TEST_CASE("irf transform of delta pulses") {
  const std::uint32_t T = 64;
  const FrequencyGrid grid(8, T);

  SUBCASE("delta at zero is one everywhere") {
    std::vector<double> h(T, 0.0);
    h[0] = 1.0;
    const auto hat = irf_transform(Irf(h), grid);
    for (const auto& v : hat) {
      CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-14));
    }
  }

  SUBCASE("delta at t0 has unit modulus and linear phase") {
    const std::uint32_t t0 = 17;
    std::vector<double> h(T, 0.0);
    h[t0] = 2.5;  // unnormalized on purpose
    const auto hat = irf_transform(Irf(h), grid);
    for (std::uint32_t j = 1; j <= grid.m(); ++j) {
      CHECK(std::abs(hat[j - 1]) == doctest::Approx(1.0).epsilon(1e-12));
      const auto expect = std::polar(1.0, grid.omega(j) * t0);
      CHECK(std::abs(hat[j - 1] - expect) < 1e-12);
    }
  }

  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(irf_transform(make_gaussian_irf(T + 1, 5.0, 0.0), grid),
                    std::invalid_argument);
  }
}

TEST_CASE("gaussian transform against direct summation and continuous limit") {
  const std::uint32_t T = 5000;
  const double sigma = 50.0;
  const Irf irf = make_gaussian_irf(T, sigma, 2500.0);
  const FrequencyGrid grid(3, T);
  const auto hat = irf_transform(irf, grid);

  // Independent oracle: plain summation, no shared code with irf_transform.
  const double w1 = kTwoPi / T;
  std::complex<double> direct{0.0, 0.0};
  for (std::uint32_t t = 0; t < T; ++t)
    direct += irf.h[t] * std::complex<double>(std::cos(w1 * t), std::sin(w1 * t));
  direct /= irf.H;

  CHECK(std::abs(hat[0] - direct) < 1e-12);
  CHECK(std::abs(std::abs(hat[0]) - std::exp(-w1 * w1 * sigma * sigma / 2.0)) < 1e-3);
}

TEST_CASE("normalized transforms stay inside the unit disk") {
  const std::uint32_t T = 200;
  std::vector<double> h(T);
  std::uint64_t state = 12345;
  for (auto& v : h) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    v = static_cast<double>(state >> 40);
  }
  const auto hat = irf_transform(Irf(h), FrequencyGrid(32, T));
  for (const auto& v : hat) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

TEST_CASE("shifted pulse distribution is a circular pmf") {
  const Irf irf = make_gaussian_irf(100, 3.0, 50.0);
  for (double depth : {0.0, 17.0, 99.0, 150.0, -23.0, 49.6}) {
    const auto pmf = shifted_pmf(irf, depth);
    double sum = 0.0;
    for (double p : pmf) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Integer shift moves the mode exactly.
  const auto pmf = shifted_pmf(irf, 20.0);
  CHECK(pmf[70] == doctest::Approx(irf.h[50] / irf.H).epsilon(1e-12));
}

TEST_CASE("scene params validation") {
  CHECK_THROWS_AS(SceneParams(1, {0.5, 0.6}, {10.0}), std::invalid_argument);
  CHECK_THROWS_AS(SceneParams(0, {0.5}, {}), std::invalid_argument);
  CHECK_THROWS_AS(SceneParams(2, {0.2, 0.4, 0.4}, {1.0, 2.0}), std::invalid_argument);
  const SceneParams bg = SceneParams::background();
  CHECK(bg.alphas[0] == 1.0);
  const SceneParams s = SceneParams::from_sbr(4.0, 1000.0);
  CHECK(s.alphas[1] == doctest::Approx(0.8));
  CHECK(s.sbr() == doctest::Approx(4.0));
}

TEST_CASE("discrete uniform characteristic function") {
  const std::uint32_t T = 5000;
  CHECK(std::abs(background_cf(0.0, T) - std::complex<double>(1.0, 0.0)) < 1e-15);
  for (std::uint32_t j : {1u, 2u, 7u}) {
    CHECK(std::abs(background_cf(kTwoPi * j / T, T)) < 1e-12);
  }
  // Off-grid it does not vanish.
  CHECK(std::abs(background_cf(1.5 * kTwoPi / T, T)) > 1e-3);
}
