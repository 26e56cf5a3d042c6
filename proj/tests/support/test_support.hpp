#pragma once

// Helpers shared by the unit and acceptance tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "copguide/board.hpp"
#include "copguide/guidance.hpp"

namespace copguide::testing {

/// Inverse of parse_frame: four big-endian cells in TR, BR, TL, BL order.
inline std::array<std::uint8_t, 8> encode_frame(const std::array<std::uint16_t, 4>& cells) {
  std::array<std::uint8_t, 8> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[2 * i] = static_cast<std::uint8_t>(cells[i] >> 8);
    out[2 * i + 1] = static_cast<std::uint8_t>(cells[i] & 0xff);
  }
  return out;
}

/// Raw cell readings for the given loads under the default calibration
/// (100 counts per kg), rounded to the nearest count.
inline std::array<std::uint16_t, 4> raw_for_loads(const std::array<double, 4>& kg) {
  std::array<std::uint16_t, 4> raw{};
  for (std::size_t i = 0; i < 4; ++i) {
    raw[i] = static_cast<std::uint16_t>(std::lround(kg[i] * 100.0));
  }
  return raw;
}

inline CoPSample sample_at(TimestampMs ts, double x, double y, bool valid = true) {
  CoPSample s;
  s.ts = ts;
  s.x = valid ? x : 0.0;
  s.y = valid ? y : 0.0;
  s.valid = valid;
  s.total_load = valid ? 65.0 : 0.0;
  return s;
}

/// A byte stream that stands on each scheduled target in turn long enough
/// to complete it, `hold_ticks` frames per trial.
inline std::vector<std::uint8_t> frames_for_session(const guidance::SessionConfig& cfg,
                                                    int hold_ticks,
                                                    const board::BoardGeometry& geom = {}) {
  const auto targets = guidance::make_targets(cfg);
  std::vector<std::uint8_t> bytes;
  for (const int idx : guidance::make_schedule(cfg)) {
    const auto loads = board::loads_for_cop(targets[idx].position(), 65.0, geom);
    const auto frame = encode_frame(raw_for_loads(loads));
    for (int k = 0; k < hold_ticks; ++k) bytes.insert(bytes.end(), frame.begin(), frame.end());
  }
  return bytes;
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("copguide-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace copguide::testing
