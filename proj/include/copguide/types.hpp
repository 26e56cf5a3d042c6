#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace copguide {

/// Monotonic milliseconds. Simulated and replayed streams use tick-aligned
/// integers so that durations derived from them are exact.
using TimestampMs = std::int64_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

enum class Modality { kHaptic, kVisual, kAudio };

inline constexpr std::array<Modality, 3> kAllModalities = {Modality::kHaptic, Modality::kVisual,
                                                           Modality::kAudio};

std::string_view to_string(Modality m);
/// Accepts the long names and the single-letter forms h, v, a.
Modality parse_modality(std::string_view s);
std::size_t index_of(Modality m);

/// Corner order used everywhere a four-cell quantity appears.
enum Corner : std::size_t {
  kTopRight = 0,
  kBottomRight = 1,
  kTopLeft = 2,
  kBottomLeft = 3,
};

/// Planar centre of pressure. x is +right, y is +forward, origin at the board
/// centre. `loads` are the corner loads (kg, TR/BR/TL/BL) the sample was
/// computed from; replay recomputes the CoP from them.
struct CoPSample {
  TimestampMs ts = 0;
  double x = 0.0;
  double y = 0.0;
  double total_load = 0.0;
  bool valid = false;
  std::array<double, 4> loads{};

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const CoPSample&, const CoPSample&) = default;
};

}  // namespace copguide
