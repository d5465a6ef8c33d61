#include "sketchlidar/rng.hpp"

#include <cmath>

namespace sketchlidar {

namespace {

// splitmix64 output mixer.
inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = seed;
  s = mix(s + 0x9e3779b97f4a7c15ULL + a);
  s = mix(s + 0x9e3779b97f4a7c15ULL + b);
  s = mix(s + 0x9e3779b97f4a7c15ULL + c);
  return Rng(s);
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t Rng::next_below(std::uint32_t n) {
  // Lemire's multiply-shift with rejection for exact uniformity.
  std::uint64_t x = next_u64() & 0xffffffffULL;
  std::uint64_t m = x * n;
  std::uint32_t l = static_cast<std::uint32_t>(m);
  if (l < n) {
    const std::uint32_t floor = static_cast<std::uint32_t>(-n) % n;
    while (l < floor) {
      x = next_u64() & 0xffffffffULL;
      m = x * n;
      l = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

std::uint32_t Rng::poisson(double mean) {
  // Knuth's product method, chunked so exp(-chunk) never underflows.
  std::uint32_t total = 0;
  while (mean > 0.0) {
    const double chunk = mean > 30.0 ? 30.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = next_double();
    while (prod >= limit) {
      ++total;
      prod *= next_double();
    }
  }
  return total;
}

}  // namespace sketchlidar
