#include "sketchlidar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sketchlidar/linalg.hpp"

namespace sketchlidar {

namespace {

double wrap_depth(double t, double T) {
  t = std::fmod(t, T);
  return t < 0.0 ? t + T : t;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double logit(double a) {
  a = std::clamp(a, 1e-6, 1.0 - 1e-6);
  return std::log(a / (1.0 - a));
}

double sigmoid(double u) {
  u = std::clamp(u, -40.0, 40.0);
  return 1.0 / (1.0 + std::exp(-u));
}

void model_signal(std::span<const std::complex<double>> hhat, const FrequencyGrid& grid, double t,
                  double alpha, std::vector<std::complex<double>>& psi) {
  for (std::uint32_t j = 1; j <= grid.m(); ++j)
    psi[j - 1] = alpha * hhat[j - 1] * std::polar(1.0, grid.omega(j) * t);
}

double identity_objective(const Sketch& sketch, std::span<const std::complex<double>> hhat,
                          const FrequencyGrid& grid, double t, double alpha) {
  double obj = 0.0;
  for (std::uint32_t j = 1; j <= grid.m(); ++j) {
    obj += std::norm(sketch.z[j - 1] - alpha * hhat[j - 1] * std::polar(1.0, grid.omega(j) * t));
  }
  return obj;
}

}  // namespace

DepthEstimate closed_form_single(const Sketch& sketch,
                                 std::span<const std::complex<double>> irf_hat,
                                 const FrequencyGrid& grid) {
  if (sketch.n == 0) throw std::invalid_argument("closed_form_single: empty pixel");
  if (irf_hat.size() != grid.m())
    throw std::invalid_argument("closed_form_single: transform length mismatch");
  const std::complex<double> h1 = irf_hat[0];
  if (std::abs(h1) <= 1e-12)
    throw std::invalid_argument("closed_form_single: pulse transform vanishes at omega_1");

  DepthEstimate e;
  const double phase = std::arg(sketch.z[0] * std::conj(h1));
  e.t_hat = wrap_depth(phase / grid.omega(1), static_cast<double>(grid.T()));
  e.alpha_hat = clamp01(std::abs(sketch.z[0]) / std::abs(h1));
  e.objective = identity_objective(sketch, irf_hat, grid, e.t_hat, e.alpha_hat);
  e.converged = true;
  return e;
}

DepthEstimate matched_filter_init(const Sketch& sketch,
                                  std::span<const std::complex<double>> irf_hat,
                                  const FrequencyGrid& grid, std::uint32_t grid_points) {
  if (irf_hat.size() != grid.m())
    throw std::invalid_argument("matched_filter_init: transform length mismatch");
  if (grid_points < grid.m())
    throw std::invalid_argument("matched_filter_init: need at least m grid points");

  DepthEstimate e;
  if (sketch.norm2() < 1e-30) {
    e.degenerate = true;
    e.objective = identity_objective(sketch, irf_hat, grid, 0.0, 0.0);
    return e;
  }

  const double T = static_cast<double>(grid.T());
  // Correlation z_j conj(hhat_j) against e^{i omega_j t} over a uniform
  // depth grid; each step multiplies per-frequency phasors.
  std::vector<std::complex<double>> coef(grid.m());
  std::vector<std::complex<double>> rot(grid.m()), cur(grid.m());
  double energy = 0.0;
  for (std::uint32_t j = 1; j <= grid.m(); ++j) {
    coef[j - 1] = sketch.z[j - 1] * std::conj(irf_hat[j - 1]);
    rot[j - 1] = std::polar(1.0, -grid.omega(j) * T / grid_points);
    cur[j - 1] = {1.0, 0.0};
    energy += std::norm(irf_hat[j - 1]);
  }
  double best = -1.0 / 0.0;
  std::uint32_t best_g = 0;
  for (std::uint32_t g = 0; g < grid_points; ++g) {
    double s = 0.0;
    for (std::uint32_t j = 0; j < grid.m(); ++j) {
      s += (coef[j] * cur[j]).real();
      cur[j] *= rot[j];
    }
    if (s > best) {
      best = s;
      best_g = g;
    }
  }
  e.t_hat = best_g * T / grid_points;
  e.alpha_hat = energy > 0.0 ? clamp01(best / energy) : 0.0;
  e.objective = identity_objective(sketch, irf_hat, grid, e.t_hat, e.alpha_hat);
  return e;
}

DepthEstimate wls_refine(const Sketch& sketch, const DepthEstimate& init, const Irf& irf,
                         const FrequencyGrid& grid, WeightMode weights) {
  return wls_refine(sketch, init, irf_spectrum(irf, grid.m()), grid, weights);
}

DepthEstimate wls_refine(const Sketch& sketch, const DepthEstimate& init,
                         std::span<const std::complex<double>> spectrum,
                         const FrequencyGrid& grid, WeightMode weights) {
  if (sketch.n == 0) throw std::invalid_argument("wls_refine: empty pixel");
  const std::uint32_t m = grid.m();
  if (spectrum.size() != static_cast<std::size_t>(m) + 1)
    throw std::invalid_argument("wls_refine: spectrum must cover grid indices 0..m");
  const double T = static_cast<double>(grid.T());
  std::vector<std::complex<double>> hhat(spectrum.begin() + 1, spectrum.end());

  DepthEstimate e = init;
  double t = init.t_hat;
  double a = logit(init.alpha_hat);

  // L, the Cholesky factor of the plug-in covariance; empty means identity.
  std::vector<std::complex<double>> chol;
  bool fallback = false;
  auto refresh_weights = [&](double t_cur, double alpha_cur) {
    chol.clear();
    if (weights != WeightMode::plugin_covariance) return;
    SketchCovariance cov = covariance(
        SceneParams::single_surface(clamp01(alpha_cur), wrap_depth(t_cur, T)), spectrum, grid);
    std::vector<std::complex<double>> fac = std::move(cov.sigma);
    if (cholesky_hermitian(fac, m, 1e-12)) {
      chol = std::move(fac);
    } else {
      fallback = true;
    }
  };
  // The first pass plugs in the initializer itself; later passes use the
  // refined iterate (logit-squashed, so alpha sits strictly inside (0, 1)).
  double weight_alpha = init.alpha_hat;

  std::vector<std::complex<double>> psi(m), r(m), q(m), jt(m), ja(m);
  const auto weighted = [&](std::vector<std::complex<double>>& vec) {
    if (chol.empty()) return;
    // Forward substitution only: cost r^H W r = ||L^{-1} r||^2.
    for (std::uint32_t i = 0; i < m; ++i) {
      std::complex<double> s = vec[i];
      for (std::uint32_t k = 0; k < i; ++k) s -= chol[i * m + k] * vec[k];
      vec[i] = s / chol[i * m + i].real();
    }
  };
  const auto eval_cost = [&](double t_cur, double a_cur) {
    const double alpha = sigmoid(a_cur);
    model_signal(hhat, grid, t_cur, alpha, psi);
    for (std::uint32_t j = 0; j < m; ++j) q[j] = sketch.z[j] - psi[j];
    weighted(q);
    double c = 0.0;
    for (const auto& v : q) c += std::norm(v);
    return c;
  };

  const std::uint32_t max_iters = 100;
  const std::uint32_t outer_passes = weights == WeightMode::plugin_covariance ? 2 : 1;
  std::uint32_t iters_used = 0;
  e.converged = false;

  for (std::uint32_t pass = 0; pass < outer_passes; ++pass) {
    refresh_weights(t, weight_alpha);
    e.converged = false;
    double cost = eval_cost(t, a);
    double lambda = 1e-3;

    while (iters_used < max_iters) {
      ++iters_used;
      const double alpha = sigmoid(a);
      model_signal(hhat, grid, t, alpha, psi);
      for (std::uint32_t j = 0; j < m; ++j) {
        r[j] = sketch.z[j] - psi[j];
        jt[j] = std::complex<double>(0.0, grid.omega(j + 1)) * psi[j];
        // d psi / d a for the logit parameter is alpha(1-alpha) hhat e^{iwt}.
        ja[j] = hhat[j] * std::polar(alpha * (1.0 - alpha), grid.omega(j + 1) * t);
      }
      weighted(r);
      weighted(jt);
      weighted(ja);

      double h00 = 0.0, h01 = 0.0, h11 = 0.0, g0 = 0.0, g1 = 0.0;
      for (std::uint32_t j = 0; j < m; ++j) {
        h00 += std::norm(jt[j]);
        h11 += std::norm(ja[j]);
        h01 += (std::conj(jt[j]) * ja[j]).real();
        g0 += (std::conj(jt[j]) * r[j]).real();
        g1 += (std::conj(ja[j]) * r[j]).real();
      }
      if (std::max(std::abs(g0), std::abs(g1)) < 1e-9) {
        e.converged = true;
        break;
      }

      bool stepped = false;
      for (int attempt = 0; attempt < 12; ++attempt) {
        const double d00 = h00 * (1.0 + lambda) + 1e-30;
        const double d11 = h11 * (1.0 + lambda) + 1e-30;
        const double det = d00 * d11 - h01 * h01;
        if (std::abs(det) < 1e-300) {
          lambda *= 10.0;
          continue;
        }
        const double dt = (d11 * g0 - h01 * g1) / det;
        const double da = (d00 * g1 - h01 * g0) / det;
        const double new_cost = eval_cost(t + dt, a + da);
        if (new_cost < cost) {
          t += dt;
          a += da;
          cost = new_cost;
          lambda = std::max(lambda / 3.0, 1e-12);
          stepped = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!stepped) break;  // no descent direction left at this scale
    }
    weight_alpha = clamp01(sigmoid(a));
  }

  e.t_hat = wrap_depth(t, T);
  e.alpha_hat = clamp01(sigmoid(a));
  e.objective = eval_cost(t, a);
  e.weight_fallback = fallback;
  return e;
}

std::optional<DepthEstimate> estimate_pixel(const Sketch& sketch, const Irf& irf,
                                            const FrequencyGrid& grid,
                                            const EstimateConfig& cfg) {
  return estimate_pixel(sketch, irf_spectrum(irf, grid.m()), grid, cfg);
}

std::optional<DepthEstimate> estimate_pixel(const Sketch& sketch,
                                            std::span<const std::complex<double>> spectrum,
                                            const FrequencyGrid& grid,
                                            const EstimateConfig& cfg) {
  if (classify(sketch, cfg.detection) != PixelLabel::surface) return std::nullopt;
  const std::span<const std::complex<double>> irf_hat = spectrum.subspan(1);
  const std::uint32_t points =
      cfg.init_grid_points > 0 ? cfg.init_grid_points : std::max<std::uint32_t>(64, 8 * grid.m());
  const DepthEstimate init = matched_filter_init(sketch, irf_hat, grid, points);
  return wls_refine(sketch, init, spectrum, grid, cfg.weights);
}

}  // namespace sketchlidar
