#include "sketchlidar/io.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>


namespace sketchlidar {

namespace {

constexpr std::uint16_t kPhotonVersion = 1;
constexpr std::uint16_t kSketchVersion = 1;

constexpr std::uint32_t byteswap_u32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(const std::filesystem::path& path, const char* what) : path_(path), what_(what) {
    std::error_code ec;
    file_size_ = std::filesystem::file_size(path, ec);
    in_.open(path, std::ios::binary);
    if (!in_ || ec) throw DataError(std::string(what) + ": cannot open " + path.string());
  }

  std::uint64_t offset() const { return offset_; }

  /// Fail fast when a header promises more records than the file can hold.
  void require_remaining(std::uint64_t bytes, const char* what_for) {
    if (offset_ + bytes > file_size_)
      fail(std::string(what_for) + " needs " + std::to_string(bytes) +
           " bytes but only " + std::to_string(file_size_ - offset_) + " remain");
  }

  void read(void* dst, std::size_t bytes) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in_.gcount()) != bytes) {
      throw DataError(std::string(what_) + ": truncated file " + path_.string() +
                      " at byte offset " + std::to_string(offset_));
    }
    offset_ += bytes;
  }

  std::uint16_t u16() {
    std::array<unsigned char, 2> b;
    read(b.data(), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32() {
    std::array<unsigned char, 4> b;
    read(b.data(), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  double f64() {
    std::array<unsigned char, 8> b;
    read(b.data(), 8);
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[i];
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  void expect_magic(const char magic[4]) {
    char got[4];
    read(got, 4);
    if (std::memcmp(got, magic, 4) != 0)
      fail(std::string("bad magic, expected \"") + std::string(magic, 4) + '"');
  }

  void expect_eof() {
    char c;
    in_.read(&c, 1);
    if (!in_.eof())
      throw DataError(std::string(what_) + ": trailing bytes in " + path_.string() +
                      " after offset " + std::to_string(offset_));
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw DataError(std::string(what_) + ": " + msg + " in " + path_.string() +
                    " near byte offset " + std::to_string(offset_));
  }

 private:
  std::filesystem::path path_;
  const char* what_;
  std::ifstream in_;
  std::uint64_t offset_ = 0;
  std::uint64_t file_size_ = 0;
};

void write_all(const std::filesystem::path& path, const std::string& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("short write to " + path.string());
}

}  // namespace

void write_photon_file(const std::filesystem::path& path, const PhotonFrame& frame) {
  const std::size_t count = static_cast<std::size_t>(frame.width) * frame.height;
  if (frame.pixels.size() != count)
    throw std::invalid_argument("write_photon_file: pixel count does not match dimensions");
  std::string buf;
  buf.append("SPLD", 4);
  put_u16(buf, kPhotonVersion);
  put_u32(buf, frame.width);
  put_u32(buf, frame.height);
  put_u32(buf, frame.T);
  put_u32(buf, frame.bin_width_ps);
  for (const auto& px : frame.pixels) {
    put_u32(buf, static_cast<std::uint32_t>(px.n()));
    for (std::uint32_t t : px.timestamps) {
      if (t >= frame.T) throw std::invalid_argument("write_photon_file: timestamp >= T");
      put_u32(buf, t);
    }
  }
  write_all(path, buf);
}

PhotonFrame read_photon_file(const std::filesystem::path& path) {
  Reader r(path, "photon file");
  r.expect_magic("SPLD");
  if (r.u16() != kPhotonVersion) r.fail("unsupported version");
  PhotonFrame frame;
  frame.width = r.u32();
  frame.height = r.u32();
  frame.T = r.u32();
  frame.bin_width_ps = r.u32();
  if (frame.T < 2) r.fail("header T must be >= 2");
  const std::size_t count = static_cast<std::size_t>(frame.width) * frame.height;
  r.require_remaining(static_cast<std::uint64_t>(count) * 4, "pixel directory");
  frame.pixels.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    const std::uint32_t n = r.u32();
    r.require_remaining(static_cast<std::uint64_t>(n) * 4, "timestamps");
    std::vector<std::uint32_t> ts(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      ts[i] = r.u32();
      if (ts[i] >= frame.T) r.fail("timestamp >= T");
    }
    frame.pixels.emplace_back(std::move(ts), frame.T,
                              static_cast<double>(frame.bin_width_ps) * 1e-12);
  }
  r.expect_eof();
  return frame;
}

void write_sketch_file(const std::filesystem::path& path, const SketchImage& image) {
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  if (image.pixels.size() != count)
    throw std::invalid_argument("write_sketch_file: pixel count does not match dimensions");
  if (image.m > 0xffff) throw std::invalid_argument("write_sketch_file: m exceeds u16");
  std::string buf;
  buf.append("SKCH", 4);
  put_u16(buf, kSketchVersion);
  put_u32(buf, image.width);
  put_u32(buf, image.height);
  put_u16(buf, static_cast<std::uint16_t>(image.m));
  put_u32(buf, image.T);
  for (const auto& s : image.pixels) {
    if (s.m() != image.m)
      throw std::invalid_argument("write_sketch_file: sketch size differs from header");
    put_u32(buf, static_cast<std::uint32_t>(s.n));
    for (const auto& z : s.z) {
      put_f64(buf, z.real());
      put_f64(buf, z.imag());
    }
  }
  write_all(path, buf);
}

SketchImage read_sketch_file(const std::filesystem::path& path) {
  Reader r(path, "sketch file");
  r.expect_magic("SKCH");
  if (r.u16() != kSketchVersion) r.fail("unsupported version");
  SketchImage image;
  image.width = r.u32();
  image.height = r.u32();
  image.m = r.u16();
  image.T = r.u32();
  if (image.m < 1) r.fail("header m must be >= 1");
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  r.require_remaining(static_cast<std::uint64_t>(count) * (4 + 16ull * image.m),
                      "sketch records");
  image.pixels.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    Sketch s;
    s.n = r.u32();
    s.z.resize(image.m);
    for (std::uint32_t j = 0; j < image.m; ++j) {
      const double re = r.f64();
      const double im = r.f64();
      s.z[j] = {re, im};
      if (std::norm(s.z[j]) > 1.0 + 1e-9) r.fail("sketch component with modulus > 1");
    }
    image.pixels.push_back(std::move(s));
  }
  r.expect_eof();
  return image;
}

SketchImage sketch_photon_file(const std::filesystem::path& path, std::uint32_t m,
                               std::size_t* max_resident) {
  Reader r(path, "photon file");
  r.expect_magic("SPLD");
  if (r.u16() != kPhotonVersion) r.fail("unsupported version");
  SketchImage image;
  image.width = r.u32();
  image.height = r.u32();
  image.T = r.u32();
  r.u32();  // bin width, not needed for sketching
  image.m = m;
  if (image.T < 2) r.fail("header T must be >= 2");
  if (m < 1 || m > image.T - 1) r.fail("requested sketch size outside [1, T-1]");

  const FrequencyGrid grid(m, image.T);
  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  r.require_remaining(static_cast<std::uint64_t>(count) * 4, "pixel directory");
  image.pixels.reserve(count);
  std::vector<std::uint32_t> chunk(kStreamChunkTimestamps);
  std::size_t resident = 0;
  for (std::size_t p = 0; p < count; ++p) {
    std::uint32_t remaining = r.u32();
    SketchAccumulator acc(grid);
    while (remaining > 0) {
      const std::size_t take = std::min<std::size_t>(remaining, kStreamChunkTimestamps);
      r.read(chunk.data(), take * sizeof(std::uint32_t));
      if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < take; ++i) chunk[i] = byteswap_u32(chunk[i]);
      }
      resident = std::max(resident, take);
      for (std::size_t i = 0; i < take; ++i) {
        if (chunk[i] >= image.T) r.fail("timestamp >= T");
        acc.update(chunk[i]);
      }
      remaining -= static_cast<std::uint32_t>(take);
    }
    image.pixels.push_back(acc.finalize());
  }
  r.expect_eof();
  if (max_resident) *max_resident = resident;
  return image;
}

PhotonFrame ingest_csv(const std::filesystem::path& path, std::uint32_t width,
                       std::uint32_t height, std::uint32_t T, std::uint32_t bin_width_ps,
                       bool skip_invalid) {
  std::ifstream in(path);
  if (!in) throw DataError("ingest_csv: cannot open " + path.string());
  if (T < 2) throw std::invalid_argument("ingest_csv: T must be >= 2");

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::vector<std::uint32_t>> stamps(count);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("pixel_x", 0) == 0) continue;  // header row
    unsigned long x, y, t;
    char extra;
    const int got = std::sscanf(line.c_str(), "%lu , %lu , %lu %c", &x, &y, &t, &extra);
    const bool parsed = got == 3;
    const bool in_range = parsed && x < width && y < height && t < T;
    if (!in_range) {
      if (skip_invalid) continue;
      throw DataError("ingest_csv: invalid row at line " + std::to_string(lineno) + " in " +
                      path.string());
    }
    stamps[y * width + x].push_back(static_cast<std::uint32_t>(t));
  }

  PhotonFrame frame;
  frame.width = width;
  frame.height = height;
  frame.T = T;
  frame.bin_width_ps = bin_width_ps;
  frame.pixels.reserve(count);
  for (auto& ts : stamps)
    frame.pixels.emplace_back(std::move(ts), T, static_cast<double>(bin_width_ps) * 1e-12);
  return frame;
}

void dump_photon_csv(const std::filesystem::path& path, const PhotonFrame& frame) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("dump_photon_csv: cannot open " + path.string());
  out << "pixel_x,pixel_y,timestamp\n";
  for (std::uint32_t y = 0; y < frame.height; ++y) {
    for (std::uint32_t x = 0; x < frame.width; ++x) {
      const auto& px = frame.pixels[static_cast<std::size_t>(y) * frame.width + x];
      for (std::uint32_t t : px.timestamps) out << x << ',' << y << ',' << t << '\n';
    }
  }
}

void write_pgm(const std::filesystem::path& path, const DetectionMap& map) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("write_pgm: cannot open " + path.string());
  out << "P5\n" << map.width << ' ' << map.height << "\n255\n";
  for (std::uint8_t v : map.v) out.put(v ? static_cast<char>(255) : static_cast<char>(0));
  if (!out) throw DataError("write_pgm: short write to " + path.string());
}

Irf read_irf_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("read_irf_file: cannot open " + path.string());
  std::vector<double> h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    try {
      h.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw DataError("read_irf_file: bad value at line " + std::to_string(lineno) + " in " +
                      path.string());
    }
  }
  if (h.size() < 2) throw DataError("read_irf_file: need at least two bins");
  return Irf(std::move(h));
}

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sketchlidar
