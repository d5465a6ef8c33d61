#pragma once

#include <cstdint>

namespace sketchlidar {

/// Small splittable PRNG (splitmix64). Substreams are derived by hashing
/// (seed, stream ids), so any (pixel, trial) gets the same sequence no matter
/// how work is scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double next_double();

  /// Uniform integer in [0, n), n >= 1.
  std::uint32_t next_below(std::uint32_t n);

  /// Poisson draw; exact (Knuth, chunked so large means do not underflow).
  std::uint32_t poisson(double mean);

 private:
  std::uint64_t state_;
};

}  // namespace sketchlidar
