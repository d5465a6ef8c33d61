#include "sketchlidar/tv.hpp"

#include <cmath>
#include <stdexcept>

namespace sketchlidar {

namespace {

// Forward differences with symmetric boundary: zero across the last row/col.
void gradient(const std::vector<double>& v, std::uint32_t w, std::uint32_t h,
              std::vector<double>& gx, std::vector<double>& gy) {
  for (std::uint32_t i = 0; i < h; ++i) {
    for (std::uint32_t j = 0; j < w; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * w + j;
      gx[k] = j + 1 < w ? v[k + 1] - v[k] : 0.0;
      gy[k] = i + 1 < h ? v[k + w] - v[k] : 0.0;
    }
  }
}

// Negative adjoint of the gradient above.
void divergence(const std::vector<double>& px, const std::vector<double>& py, std::uint32_t w,
                std::uint32_t h, std::vector<double>& d) {
  for (std::uint32_t i = 0; i < h; ++i) {
    for (std::uint32_t j = 0; j < w; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * w + j;
      double s = 0.0;
      if (j + 1 < w) s += px[k];
      if (j >= 1) s -= px[k - 1];
      if (i + 1 < h) s += py[k];
      if (i >= 1) s -= py[k - w];
      d[k] = s;
    }
  }
}

double tv_norm(const std::vector<double>& gx, const std::vector<double>& gy) {
  double s = 0.0;
  for (std::size_t k = 0; k < gx.size(); ++k) s += std::hypot(gx[k], gy[k]);
  return s;
}

// Minimizes ||v - y||^2 + tau TV(v) by accelerated projected gradient on the
// dual: v(p) = y + (tau/2) div p with the field p confined to unit disks.
// The duality gap tau * (TV(v) - <grad v, p>) bounds the primal error, and
// the best primal iterate seen is the one returned.
std::vector<double> denoise_dual_projection(const StatImage& y, double tau,
                                            const TvOptions& opts) {
  const std::uint32_t w = y.width, h = y.height;
  const std::size_t size = y.size();
  double ynorm2 = 0.0;
  for (double v : y.values) ynorm2 += v * v;
  if (ynorm2 == 0.0) return y.values;

  std::vector<double> px(size, 0.0), py(size, 0.0);
  std::vector<double> px_prev(size, 0.0), py_prev(size, 0.0);
  std::vector<double> pbx(size, 0.0), pby(size, 0.0);
  std::vector<double> d(size), v(size), gx(size), gy(size);

  std::vector<double> best = y.values;
  double best_obj = tv_objective(y, best, tau);

  const double step = 1.0 / (4.0 * tau);
  double tk = 1.0;
  for (std::uint32_t iter = 0; iter < opts.max_iters; ++iter) {
    divergence(pbx, pby, w, h, d);
    for (std::size_t k = 0; k < size; ++k) v[k] = y.values[k] + 0.5 * tau * d[k];
    gradient(v, w, h, gx, gy);
    for (std::size_t k = 0; k < size; ++k) {
      double qx = pbx[k] + step * gx[k];
      double qy = pby[k] + step * gy[k];
      const double mag = std::hypot(qx, qy);
      if (mag > 1.0) {
        qx /= mag;
        qy /= mag;
      }
      px_prev[k] = px[k];
      py_prev[k] = py[k];
      px[k] = qx;
      py[k] = qy;
    }

    // Primal point and gap for the projected (feasible) field.
    divergence(px, py, w, h, d);
    double fid = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      v[k] = y.values[k] + 0.5 * tau * d[k];
      const double r = v[k] - y.values[k];
      fid += r * r;
    }
    gradient(v, w, h, gx, gy);
    double tv = 0.0, inner = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      tv += std::hypot(gx[k], gy[k]);
      inner += gx[k] * px[k] + gy[k] * py[k];
    }
    const double obj = fid + tau * tv;
    if (obj < best_obj) {
      best_obj = obj;
      best = v;
    }
    const double gap = tau * (tv - inner);
    if (gap <= opts.tol * ynorm2) break;

    const double tnext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    const double momentum = (tk - 1.0) / tnext;
    for (std::size_t k = 0; k < size; ++k) {
      pbx[k] = px[k] + momentum * (px[k] - px_prev[k]);
      pby[k] = py[k] + momentum * (py[k] - py_prev[k]);
    }
    tk = tnext;
  }
  return best;
}

// Primal-dual iteration for images with masked pixels: the fidelity weight is
// zero on the mask, so those pixels are filled purely by the regularizer.
std::vector<double> denoise_primal_dual(const StatImage& y, double tau, const TvOptions& opts) {
  const std::uint32_t w = y.width, h = y.height;
  const std::size_t size = y.size();

  std::vector<double> v(size), vbar(size), vprev(size);
  for (std::size_t k = 0; k < size; ++k) v[k] = y.mask[k] ? y.values[k] : 0.0;
  vbar = v;

  std::vector<double> qx(size, 0.0), qy(size, 0.0);
  std::vector<double> gx(size), gy(size), d(size);

  const double sigma = 1.0 / std::sqrt(8.0);
  const double s = 1.0 / std::sqrt(8.0);
  for (std::uint32_t iter = 0; iter < opts.max_iters; ++iter) {
    gradient(vbar, w, h, gx, gy);
    for (std::size_t k = 0; k < size; ++k) {
      double ax = qx[k] + sigma * gx[k];
      double ay = qy[k] + sigma * gy[k];
      const double mag = std::hypot(ax, ay);
      if (mag > tau) {
        ax *= tau / mag;
        ay *= tau / mag;
      }
      qx[k] = ax;
      qy[k] = ay;
    }
    divergence(qx, qy, w, h, d);
    vprev = v;
    for (std::size_t k = 0; k < size; ++k) {
      const double u = v[k] + s * d[k];
      v[k] = y.mask[k] ? (u + 2.0 * s * y.values[k]) / (1.0 + 2.0 * s) : u;
    }
    for (std::size_t k = 0; k < size; ++k) vbar[k] = 2.0 * v[k] - vprev[k];
  }
  return v;
}

}  // namespace

bool StatImage::all_valid() const {
  if (mask.empty()) return true;
  for (std::uint8_t m : mask)
    if (!m) return false;
  return true;
}

double tv_objective(const StatImage& y, const std::vector<double>& v, double tau) {
  const std::size_t size = y.size();
  std::vector<double> gx(size), gy(size);
  gradient(v, y.width, y.height, gx, gy);
  double obj = tau * tv_norm(gx, gy);
  for (std::size_t k = 0; k < size; ++k) {
    if (!y.mask.empty() && !y.mask[k]) continue;
    const double r = v[k] - y.values[k];
    obj += r * r;
  }
  return obj;
}

std::vector<double> tv_denoise(const StatImage& y, double tau, const TvOptions& opts) {
  if (y.values.size() != y.size())
    throw std::invalid_argument("tv_denoise: image dimensions do not match data");
  if (!y.mask.empty() && y.mask.size() != y.size())
    throw std::invalid_argument("tv_denoise: mask dimensions do not match data");
  if (!(tau >= 0.0)) throw std::invalid_argument("tv_denoise: tau must be nonnegative");
  for (double v : y.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("tv_denoise: non-finite input");
  }
  if (tau == 0.0 || y.size() == 0) return y.values;
  return y.all_valid() ? denoise_dual_projection(y, tau, opts) : denoise_primal_dual(y, tau, opts);
}

DetectionMap detection_map(const StatImage& stats, double threshold, double tau,
                           const TvOptions& opts) {
  StatImage shifted;
  shifted.width = stats.width;
  shifted.height = stats.height;
  shifted.mask = stats.mask;
  shifted.values.resize(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const bool valid = stats.mask.empty() || stats.mask[k];
    shifted.values[k] = valid ? stats.values[k] - threshold : 0.0;
  }

  const std::vector<double> v = tv_denoise(shifted, tau, opts);

  DetectionMap map;
  map.width = stats.width;
  map.height = stats.height;
  map.v.resize(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) map.v[k] = v[k] > 0.0 ? 1 : 0;
  return map;
}

}  // namespace sketchlidar
