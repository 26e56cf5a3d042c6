#include "copguide/board.hpp"

#include <algorithm>
#include <string>

#include "copguide/error.hpp"

namespace copguide::board {

void CalibrationTable::validate() const {
  for (std::size_t c = 0; c < refs.size(); ++c) {
    const auto& r = refs[c];
    if (!(r[0] < r[1] && r[1] < r[2])) {
      throw Error(ErrorCode::kInvalidCalibration,
                  "calibration corner " + std::to_string(c) + " is not strictly increasing");
    }
  }
}

void BoardGeometry::validate() const {
  if (!(length_x > 0.0 && length_y > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "board dimensions must be positive");
  }
}

RawBoardFrame parse_frame(std::span<const std::uint8_t> bytes, TimestampMs ts) {
  if (bytes.size() != kFrameSize) {
    throw Error(ErrorCode::kWrongLength,
                "frame has " + std::to_string(bytes.size()) + " octets, expected 8");
  }
  RawBoardFrame frame;
  frame.ts = ts;
  for (std::size_t i = 0; i < 4; ++i) {
    frame.cells[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
  }
  return frame;
}

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

RawBoardFrame parse_frame_hex(std::string_view hex, TimestampMs ts) {
  if (hex.size() < 2 * kFrameSize) {
    throw Error(ErrorCode::kTruncatedFrame, "hex frame shorter than 16 digits");
  }
  if (hex.size() != 2 * kFrameSize) {
    throw Error(ErrorCode::kWrongLength, "hex frame longer than 16 digits");
  }
  std::array<std::uint8_t, kFrameSize> bytes{};
  for (std::size_t i = 0; i < kFrameSize; ++i) {
    const int hi = hex_digit(hex[2 * i]);
    const int lo = hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kWrongLength, "non-hex digit in frame");
    }
    bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return parse_frame(bytes, ts);
}

double calibrate_cell(std::uint16_t raw, const std::array<std::uint16_t, 3>& refs) {
  const double r = raw;
  const double r0 = refs[0];
  const double r17 = refs[1];
  const double r34 = refs[2];
  if (r <= r17) {
    return std::max(0.0, 17.0 * (r - r0) / (r17 - r0));
  }
  return 17.0 + 17.0 * (r - r17) / (r34 - r17);
}

LoadSample calibrate(const RawBoardFrame& frame, const CalibrationTable& table) {
  LoadSample out;
  out.ts = frame.ts;
  for (std::size_t c = 0; c < 4; ++c) {
    out.loads[c] = calibrate_cell(frame.cells[c], table.refs[c]);
  }
  return out;
}

CoPSample compute_cop(const LoadSample& sample, const BoardGeometry& geom, double min_load_kg) {
  const auto& l = sample.loads;
  const double total = sample.total();
  CoPSample out;
  out.ts = sample.ts;
  out.total_load = total;
  out.loads = l;
  if (!(total >= min_load_kg) || total <= 0.0) {
    out.valid = false;
    return out;
  }
  const double right = l[kTopRight] + l[kBottomRight];
  const double left = l[kTopLeft] + l[kBottomLeft];
  const double front = l[kTopRight] + l[kTopLeft];
  const double back = l[kBottomRight] + l[kBottomLeft];
  out.x = 0.5 * geom.length_x * (right - left) / total;
  out.y = 0.5 * geom.length_y * (front - back) / total;
  out.valid = true;
  return out;
}

std::array<double, 4> loads_for_cop(Vec2 pos, double total_kg, const BoardGeometry& geom) {
  // Bilinear split: each side's share is (1 ± a)/2 with a the normalised offset.
  const double a = std::clamp(pos.x / (0.5 * geom.length_x), -1.0, 1.0);
  const double b = std::clamp(pos.y / (0.5 * geom.length_y), -1.0, 1.0);
  const double q = 0.25 * total_kg;
  return {q * (1 + a) * (1 + b), q * (1 + a) * (1 - b), q * (1 - a) * (1 + b),
          q * (1 - a) * (1 - b)};
}

void compute_cop_batch(std::span<const LoadSample> in, const BoardGeometry& geom,
                       double min_load_kg, std::span<CoPSample> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = compute_cop(in[i], geom, min_load_kg);
  }
}

void compute_cop_batch_serial(std::span<const LoadSample> in, const BoardGeometry& geom,
                              double min_load_kg, std::span<CoPSample> out) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = compute_cop(in[i], geom, min_load_kg);
  }
}

}  // namespace copguide::board
