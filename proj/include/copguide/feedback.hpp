#pragma once

// Modality encoders: error vector (cm) -> guidance command.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "copguide/types.hpp"

namespace copguide::feedback {

enum class Motor : std::uint8_t { kFront = 1, kBack = 2, kLeft = 4, kRight = 8 };

inline constexpr Motor kAllMotors[] = {Motor::kFront, Motor::kBack, Motor::kLeft, Motor::kRight};

std::string_view to_string(Motor m);
std::optional<Motor> parse_motor(std::string_view s);

/// Small bitset over the four waist motors.
class MotorSet {
 public:
  constexpr MotorSet() = default;
  constexpr MotorSet(std::initializer_list<Motor> motors) {
    for (Motor m : motors) insert(m);
  }

  constexpr void insert(Motor m) { bits_ |= static_cast<std::uint8_t>(m); }
  constexpr bool contains(Motor m) const { return bits_ & static_cast<std::uint8_t>(m); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  std::size_t size() const;
  std::vector<std::string> names() const;

  friend constexpr bool operator==(MotorSet, MotorSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

inline constexpr int kGuideFreqHz = 100;
inline constexpr int kInRegionFreqHz = 150;

struct HapticCommand {
  MotorSet motors;
  int freq_hz = kGuideFreqHz;
  // Non-zero on the region-entry success cue: all four motors pulse at
  // 150 Hz for this long. `motors` itself stays empty.
  int pulse_ms = 0;

  friend bool operator==(const HapticCommand&, const HapticCommand&) = default;
};

struct VisualCommand {
  double px = 0.0;
  double py = 0.0;
  bool in_region = false;

  friend bool operator==(const VisualCommand&, const VisualCommand&) = default;
};

struct AudioCommand {
  static AudioCommand answer() { return {true, 0}; }
  static AudioCommand clock(int hour) { return {false, hour}; }

  bool is_answer = false;
  int hour = 12;  // 1..12 when !is_answer

  friend bool operator==(const AudioCommand&, const AudioCommand&) = default;
};

using FeedbackCommand = std::variant<HapticCommand, VisualCommand, AudioCommand>;

Modality modality_of(const FeedbackCommand& cmd);

struct EncoderConfig {
  double deadzone_cm = 1.0;       // per axis, haptic only
  double visual_scale_cm = 10.0;  // error magnitude at the square's edge
  int audio_repeat_ms = 1500;
  int success_pulse_ms = 200;

  void validate() const;
};

HapticCommand encode_haptic(Vec2 e, bool in_region, const EncoderConfig& cfg);
VisualCommand encode_visual(Vec2 e, bool in_region, const EncoderConfig& cfg);

/// Clock hour for a bearing in degrees (0 = forward, clockwise). Half-hour
/// ties round up to the larger hour; 0 maps to 12.
int bearing_deg_to_clock(double bearing_deg);
/// Bearing of `e` in [0, 360). Throws kZeroVector for e == 0.
double bearing_deg(Vec2 e);
int bearing_to_clock(Vec2 e);

/// What the audio channel last said and whether the CoP was inside then.
struct AudioState {
  std::optional<TimestampMs> last_prompt_ms;
  std::optional<AudioCommand> last_prompt;
  bool was_in_region = false;
};

/// nullopt means silence. Answer on region entry and every repeat interval
/// while inside; otherwise the clock hour, immediately when it changes and
/// again each repeat interval.
std::optional<AudioCommand> encode_audio(Vec2 e, bool in_region, TimestampMs now_ms,
                                         const AudioState& state, const EncoderConfig& cfg);

/// Per-session emitter. Turns a continuous error signal into the command
/// stream published on the bus: haptic and visual commands on change, audio
/// by its prompt cadence, plus the haptic success cue on region entry.
class FeedbackEncoder {
 public:
  FeedbackEncoder(Modality modality, EncoderConfig cfg);

  std::optional<FeedbackCommand> update(Vec2 e, bool in_region, TimestampMs now_ms);

  /// Forget the last emission (next update always emits). Used between trials.
  void reset();
  Modality modality() const { return modality_; }

 private:
  Modality modality_;
  EncoderConfig cfg_;
  std::optional<FeedbackCommand> last_;
  AudioState audio_;
  bool was_in_region_ = false;
};

}  // namespace copguide::feedback
