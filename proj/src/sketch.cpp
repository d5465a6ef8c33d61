#include "sketchlidar/sketch.hpp"

#include <cmath>
#include <stdexcept>

namespace sketchlidar {

namespace {

// Neumaier compensated add: sum + comp carries the exact running total.
inline void comp_add(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v))
    comp += (sum - t) + v;
  else
    comp += (v - t) + sum;
  sum = t;
}

inline void comp_add(std::complex<double>& sum, std::complex<double>& comp,
                     std::complex<double> v) {
  double re = sum.real(), rc = comp.real();
  double im = sum.imag(), ic = comp.imag();
  comp_add(re, rc, v.real());
  comp_add(im, ic, v.imag());
  sum = {re, im};
  comp = {rc, ic};
}

}  // namespace

double Sketch::norm2() const {
  double s = 0.0;
  for (const auto& v : z) s += std::norm(v);
  return s;
}

SketchAccumulator::SketchAccumulator(FrequencyGrid grid)
    : grid_(std::move(grid)), sum_(grid_.m()), comp_(grid_.m()) {}

void SketchAccumulator::update(std::uint32_t x) {
  const std::uint32_t T = grid_.T();
  if (x >= T) throw std::out_of_range("SketchAccumulator: timestamp outside [0, T-1]");
  const std::uint32_t m = grid_.m();
  if (grid_.has_root_table()) {
    // e^{i omega_j x} = e^{i 2 pi (j x mod T) / T}, exact on the grid.
    for (std::uint32_t j = 1; j <= m; ++j) {
      const std::uint64_t idx = (static_cast<std::uint64_t>(j) * x) % T;
      comp_add(sum_[j - 1], comp_[j - 1], grid_.unit_root(idx));
    }
  } else {
    const std::complex<double> step =
        std::polar(1.0, kTwoPi * static_cast<double>(x) / static_cast<double>(T));
    std::complex<double> phase = step;
    for (std::uint32_t j = 1; j <= m; ++j) {
      comp_add(sum_[j - 1], comp_[j - 1], phase);
      phase *= step;
    }
  }
  ++count_;
}

void SketchAccumulator::merge(const SketchAccumulator& other) {
  if (!grid_.same_as(other.grid_))
    throw std::invalid_argument("SketchAccumulator: cannot merge different grids");
  for (std::uint32_t j = 0; j < grid_.m(); ++j) {
    comp_add(sum_[j], comp_[j], other.sum_[j]);
    comp_add(sum_[j], comp_[j], other.comp_[j]);
  }
  count_ += other.count_;
}

Sketch SketchAccumulator::finalize() const {
  Sketch s;
  s.n = count_;
  s.z.resize(grid_.m());
  if (count_ == 0) return s;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::uint32_t j = 0; j < grid_.m(); ++j) s.z[j] = (sum_[j] + comp_[j]) * inv;
  return s;
}

std::complex<double> SketchAccumulator::sum(std::uint32_t j) const {
  return sum_[j - 1] + comp_[j - 1];
}

Sketch sketch_stream(const PhotonStream& stream, const FrequencyGrid& grid) {
  if (stream.T != grid.T())
    throw std::invalid_argument("sketch_stream: stream T does not match grid");
  SketchAccumulator acc(grid);
  for (std::uint32_t x : stream.timestamps) acc.update(x);
  return acc.finalize();
}

ModelCf model_cf(const SceneParams& theta, std::span<const std::complex<double>> irf_hat,
                 const FrequencyGrid& grid) {
  if (irf_hat.size() != grid.m())
    throw std::invalid_argument("model_cf: transform length does not match grid");
  ModelCf cf;
  cf.psi.assign(grid.m(), {0.0, 0.0});
  // The uniform background is exactly blind on this grid; only surfaces count.
  for (std::uint32_t k = 1; k <= theta.K; ++k) {
    for (std::uint32_t j = 1; j <= grid.m(); ++j) {
      cf.psi[j - 1] +=
          theta.alphas[k] * irf_hat[j - 1] * std::polar(1.0, grid.omega(j) * theta.depths[k - 1]);
    }
  }
  return cf;
}

std::complex<double> model_cf_at(const SceneParams& theta, const Irf& irf, double omega,
                                 std::uint32_t T) {
  std::complex<double> psi = theta.alphas[0] * background_cf(omega, T);
  if (theta.K == 0) return psi;
  // Signal transform at an arbitrary frequency, normalized by H.
  double re = 0.0, im = 0.0;
  for (std::uint32_t t = 0; t < irf.T(); ++t) {
    if (irf.h[t] == 0.0) continue;
    re += irf.h[t] * std::cos(omega * t);
    im += irf.h[t] * std::sin(omega * t);
  }
  const std::complex<double> hhat = std::complex<double>(re, im) / irf.H;
  for (std::uint32_t k = 1; k <= theta.K; ++k)
    psi += theta.alphas[k] * hhat * std::polar(1.0, omega * theta.depths[k - 1]);
  return psi;
}

SketchCovariance covariance(const SceneParams& theta, const Irf& irf,
                            const FrequencyGrid& grid) {
  return covariance(theta, irf_spectrum(irf, grid.m()), grid);
}

SketchCovariance covariance(const SceneParams& theta,
                            std::span<const std::complex<double>> hhat,
                            const FrequencyGrid& grid) {
  const std::uint32_t m = grid.m();
  const std::uint32_t T = grid.T();
  if (hhat.size() != static_cast<std::size_t>(m) + 1)
    throw std::invalid_argument("covariance: spectrum must cover grid indices 0..m");
  // Psi at grid indices 0..m; differences of grid frequencies are again grid
  // frequencies, where the background term is exactly zero (and Psi(0) = 1).
  std::vector<std::complex<double>> psi(m + 1, {0.0, 0.0});
  psi[0] = {1.0, 0.0};
  for (std::uint32_t k = 1; k <= theta.K; ++k) {
    for (std::uint32_t idx = 1; idx <= m; ++idx) {
      const double w = kTwoPi * static_cast<double>(idx) / static_cast<double>(T);
      psi[idx] += theta.alphas[k] * hhat[idx] * std::polar(1.0, w * theta.depths[k - 1]);
    }
  }

  SketchCovariance cov;
  cov.m = m;
  cov.sigma.resize(static_cast<std::size_t>(m) * m);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      const std::int32_t d = static_cast<std::int32_t>(i) - static_cast<std::int32_t>(j);
      const std::complex<double> psi_diff = d >= 0 ? psi[d] : std::conj(psi[-d]);
      cov.at(i, j) = psi_diff - psi[i + 1] * std::conj(psi[j + 1]);
    }
  }
  return cov;
}

}  // namespace sketchlidar
