#pragma once

// Balance-board sensing: frame codec, three-point calibration, and the
// moment-balance centre-of-pressure computation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "copguide/types.hpp"

namespace copguide::board {

/// Wire frame: four big-endian uint16 cells, TR, BR, TL, BL.
inline constexpr std::size_t kFrameSize = 8;
inline constexpr double kDefaultMinLoadKg = 10.0;

struct RawBoardFrame {
  TimestampMs ts = 0;
  std::array<std::uint16_t, 4> cells{};

  friend bool operator==(const RawBoardFrame&, const RawBoardFrame&) = default;
};

/// Raw readings at 0, 17 and 34 kg for each corner.
struct CalibrationTable {
  std::array<std::array<std::uint16_t, 3>, 4> refs{{
      {0, 1700, 3400},
      {0, 1700, 3400},
      {0, 1700, 3400},
      {0, 1700, 3400},
  }};

  /// Throws Error(kInvalidCalibration) unless every corner is strictly
  /// increasing.
  void validate() const;
};

struct LoadSample {
  TimestampMs ts = 0;
  std::array<double, 4> loads{};

  double total() const { return loads[0] + loads[1] + loads[2] + loads[3]; }
};

struct BoardGeometry {
  double length_x = 43.3;  // left-right sensor span, cm
  double length_y = 23.8;  // front-back sensor span, cm

  void validate() const;
};

/// Decodes exactly one frame. Throws Error(kWrongLength) for any other size.
RawBoardFrame parse_frame(std::span<const std::uint8_t> bytes, TimestampMs ts = 0);

/// Decodes a 16-hex-digit frame as written in replay logs. Short input
/// raises kTruncatedFrame, long input kWrongLength.
RawBoardFrame parse_frame_hex(std::string_view hex, TimestampMs ts = 0);

/// Piecewise-linear per-corner conversion to kg. Below ref0 clamps to zero;
/// above ref34 extrapolates on the upper segment.
LoadSample calibrate(const RawBoardFrame& frame, const CalibrationTable& table);
double calibrate_cell(std::uint16_t raw, const std::array<std::uint16_t, 3>& refs);

CoPSample compute_cop(const LoadSample& sample, const BoardGeometry& geom,
                      double min_load_kg = kDefaultMinLoadKg);

/// Corner loads that reproduce `pos` with the given total load under
/// compute_cop. `pos` must lie inside the board rectangle.
std::array<double, 4> loads_for_cop(Vec2 pos, double total_kg, const BoardGeometry& geom);

// Batch kernels. `out.size()` must equal `in.size()`.
void compute_cop_batch(std::span<const LoadSample> in, const BoardGeometry& geom,
                       double min_load_kg, std::span<CoPSample> out);
void compute_cop_batch_serial(std::span<const LoadSample> in, const BoardGeometry& geom,
                              double min_load_kg, std::span<CoPSample> out);

}  // namespace copguide::board
