#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sketchlidar/core.hpp"
#include "sketchlidar/sketch.hpp"
#include "sketchlidar/tv.hpp"

namespace sketchlidar {

/// Corrupt or inconsistent input data. Messages carry the byte offset or
/// line number of the offending record.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// In-memory photon frame (one stream per pixel, row-major).
struct PhotonFrame {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t T = 0;
  std::uint32_t bin_width_ps = 0;
  std::vector<PhotonStream> pixels;
};

/// Per-pixel sketches of a frame (the on-disk sketch payload).
struct SketchImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t m = 0;
  std::uint32_t T = 0;
  std::vector<Sketch> pixels;
};

// Binary photon file, magic "SPLD", little-endian:
//   header: magic[4], version u16, width u32, height u32, T u32, bin_width_ps u32
//   body:   per pixel row-major: count u32, count * (timestamp u32)
void write_photon_file(const std::filesystem::path& path, const PhotonFrame& frame);
PhotonFrame read_photon_file(const std::filesystem::path& path);

// Binary sketch file, magic "SKCH", little-endian:
//   header: magic[4], version u16, width u32, height u32, m u16, T u32
//   body:   per pixel row-major: n u32, m * (re f64, im f64)
void write_sketch_file(const std::filesystem::path& path, const SketchImage& image);
SketchImage read_sketch_file(const std::filesystem::path& path);

/// One-pass streaming sketch of a photon file. Timestamps are consumed in
/// fixed-size chunks; no per-pixel histogram or timestamp vector is ever
/// materialized. max_resident reports the largest number of timestamps held
/// at once (bounded by the chunk capacity regardless of pixel counts).
SketchImage sketch_photon_file(const std::filesystem::path& path, std::uint32_t m,
                               std::size_t* max_resident = nullptr);

/// Timestamps held per read chunk in sketch_photon_file.
inline constexpr std::size_t kStreamChunkTimestamps = 4096;

/// CSV rows (pixel_x, pixel_y, timestamp) -> validated frame. Invalid rows
/// abort with their line number unless skip_invalid is set.
PhotonFrame ingest_csv(const std::filesystem::path& path, std::uint32_t width,
                       std::uint32_t height, std::uint32_t T, std::uint32_t bin_width_ps,
                       bool skip_invalid = false);

/// Inverse of ingest_csv, for round trips.
void dump_photon_csv(const std::filesystem::path& path, const PhotonFrame& frame);

/// Binary PGM (P5), 0 or 255 per pixel.
void write_pgm(const std::filesystem::path& path, const DetectionMap& map);

/// Pulse shape from a text file, one nonnegative value per line.
Irf read_irf_file(const std::filesystem::path& path);

/// Deterministic float formatting used by every CSV writer (%.17g).
std::string csv_double(double v);

}  // namespace sketchlidar
