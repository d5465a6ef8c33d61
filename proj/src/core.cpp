#include "sketchlidar/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sketchlidar {

PhotonStream::PhotonStream(std::vector<std::uint32_t> ts, std::uint32_t T_, double bin_width_)
    : timestamps(std::move(ts)), T(T_), bin_width(bin_width_) {
  if (T < 2) throw std::invalid_argument("PhotonStream: T must be >= 2");
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    if (timestamps[i] >= T) {
      throw std::out_of_range("PhotonStream: timestamp " + std::to_string(timestamps[i]) +
                              " at index " + std::to_string(i) + " is outside [0, T-1]");
    }
  }
}

Irf::Irf(std::vector<double> h_) : h(std::move(h_)) {
  if (h.size() < 2) throw std::invalid_argument("Irf: need at least two bins");
  double sum = 0.0;
  for (double v : h) {
    if (!(v >= 0.0)) throw std::invalid_argument("Irf: pulse values must be nonnegative");
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("Irf: degenerate pulse, H must be positive");
  H = sum;
}

Irf make_gaussian_irf(std::uint32_t T, double sigma, double center) {
  if (T < 2) throw std::invalid_argument("make_gaussian_irf: T must be >= 2");
  if (!(sigma > 0.0)) throw std::invalid_argument("make_gaussian_irf: sigma must be positive");
  std::vector<double> h(T);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (std::uint32_t t = 0; t < T; ++t) {
    const double d = static_cast<double>(t) - center;
    h[t] = std::exp(-d * d * inv2s2);
  }
  return Irf(std::move(h));
}

std::vector<double> shifted_pmf(const Irf& irf, double depth) {
  const std::uint32_t T = irf.T();
  const std::int64_t shift =
      ((static_cast<std::int64_t>(std::llround(depth)) % T) + T) % T;
  std::vector<double> pmf(T);
  for (std::uint32_t x = 0; x < T; ++x) {
    const std::uint32_t src = static_cast<std::uint32_t>((x + T - shift) % T);
    pmf[x] = irf.h[src] / irf.H;
  }
  return pmf;
}

FrequencyGrid::FrequencyGrid(std::uint32_t m, std::uint32_t T) : m_(m), T_(T) {
  if (T < 2) throw std::invalid_argument("FrequencyGrid: T must be >= 2");
  if (m < 1 || m > T - 1)
    throw std::invalid_argument("FrequencyGrid: m must be in [1, T-1]");
  omegas_.resize(m);
  for (std::uint32_t j = 1; j <= m; ++j)
    omegas_[j - 1] = kTwoPi * static_cast<double>(j) / static_cast<double>(T);
  if (T <= kMaxRootTableT) {
    auto roots = std::make_shared<std::vector<std::complex<double>>>(T);
    for (std::uint32_t k = 0; k < T; ++k)
      (*roots)[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(T));
    roots_ = std::move(roots);
  }
}

SceneParams::SceneParams(std::uint32_t K_, std::vector<double> alphas_,
                         std::vector<double> depths_)
    : K(K_), alphas(std::move(alphas_)), depths(std::move(depths_)) {
  if (K > 1) throw std::invalid_argument("SceneParams: only K in {0, 1} is supported");
  if (alphas.size() != K + 1)
    throw std::invalid_argument("SceneParams: need K+1 mixing weights");
  if (depths.size() != K) throw std::invalid_argument("SceneParams: need K depths");
  double sum = 0.0;
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("SceneParams: weights must lie in [0, 1]");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("SceneParams: weights must sum to 1");
}

SceneParams SceneParams::background() { return SceneParams(0, {1.0}, {}); }

SceneParams SceneParams::single_surface(double alpha1, double depth) {
  return SceneParams(1, {1.0 - alpha1, alpha1}, {depth});
}

SceneParams SceneParams::from_sbr(double sbr, double depth) {
  if (!(sbr >= 0.0)) throw std::invalid_argument("SceneParams: SBR must be nonnegative");
  return single_surface(sbr / (1.0 + sbr), depth);
}

double SceneParams::sbr() const {
  if (K == 0) return 0.0;
  return alphas[1] / (1.0 - alphas[1]);
}

std::vector<std::complex<double>> irf_transform(const Irf& irf, const FrequencyGrid& grid) {
  if (grid.T() != irf.T())
    throw std::invalid_argument("irf_transform: grid T does not match pulse length");
  const std::uint32_t m = grid.m();
  std::vector<std::complex<double>> out(m);
  auto full = irf_spectrum(irf, m);
  for (std::uint32_t j = 1; j <= m; ++j) out[j - 1] = full[j];
  return out;
}

std::vector<std::complex<double>> irf_spectrum(const Irf& irf, std::uint32_t kmax) {
  const std::uint32_t T = irf.T();
  std::vector<std::complex<double>> out(kmax + 1);
  for (std::uint32_t k = 0; k <= kmax; ++k) {
    const double w = kTwoPi * static_cast<double>(k) / static_cast<double>(T);
    double re = 0.0, im = 0.0;
    for (std::uint32_t t = 0; t < T; ++t) {
      if (irf.h[t] == 0.0) continue;
      re += irf.h[t] * std::cos(w * t);
      im += irf.h[t] * std::sin(w * t);
    }
    out[k] = std::complex<double>(re, im) / irf.H;
  }
  return out;
}

std::complex<double> background_cf(double omega, std::uint32_t T) {
  // (1/T) sum_{t=0}^{T-1} e^{i omega t}, the Dirichlet kernel form.
  const double half = 0.5 * omega;
  const double denom = std::sin(half);
  if (std::abs(denom) < 1e-14) return {1.0, 0.0};
  const double ratio = std::sin(half * static_cast<double>(T)) / (static_cast<double>(T) * denom);
  return std::polar(ratio, half * static_cast<double>(T - 1));
}

}  // namespace sketchlidar
