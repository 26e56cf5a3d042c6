#include "copguide/feedback.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "copguide/error.hpp"

namespace copguide::feedback {

std::string_view to_string(Motor m) {
  switch (m) {
    case Motor::kFront: return "front";
    case Motor::kBack: return "back";
    case Motor::kLeft: return "left";
    case Motor::kRight: return "right";
  }
  return "unknown";
}

std::optional<Motor> parse_motor(std::string_view s) {
  for (Motor m : kAllMotors) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::size_t MotorSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::string> MotorSet::names() const {
  std::vector<std::string> out;
  for (Motor m : kAllMotors) {
    if (contains(m)) out.emplace_back(to_string(m));
  }
  return out;
}

Modality modality_of(const FeedbackCommand& cmd) {
  switch (cmd.index()) {
    case 0: return Modality::kHaptic;
    case 1: return Modality::kVisual;
    default: return Modality::kAudio;
  }
}

void EncoderConfig::validate() const {
  if (!(deadzone_cm >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "deadzone_cm must be >= 0");
  if (!(visual_scale_cm > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "visual_scale_cm must be positive");
  }
  if (audio_repeat_ms <= 0)
    throw Error(ErrorCode::kInvalidConfig, "audio_repeat_ms must be positive");
  if (success_pulse_ms < 0) throw Error(ErrorCode::kInvalidConfig, "success_pulse_ms must be >= 0");
}

HapticCommand encode_haptic(Vec2 e, bool in_region, const EncoderConfig& cfg) {
  HapticCommand cmd;
  if (e.x > cfg.deadzone_cm) cmd.motors.insert(Motor::kRight);
  if (e.x < -cfg.deadzone_cm) cmd.motors.insert(Motor::kLeft);
  if (e.y > cfg.deadzone_cm) cmd.motors.insert(Motor::kFront);
  if (e.y < -cfg.deadzone_cm) cmd.motors.insert(Motor::kBack);
  cmd.freq_hz = in_region ? kInRegionFreqHz : kGuideFreqHz;
  return cmd;
}

VisualCommand encode_visual(Vec2 e, bool in_region, const EncoderConfig& cfg) {
  return {std::clamp(e.x / cfg.visual_scale_cm, -1.0, 1.0),
          std::clamp(e.y / cfg.visual_scale_cm, -1.0, 1.0), in_region};
}

int bearing_deg_to_clock(double bearing_deg) {
  const int hour = static_cast<int>(std::floor(bearing_deg / 30.0 + 0.5)) % 12;
  return hour == 0 ? 12 : hour;
}

double bearing_deg(Vec2 e) {
  if (e.x == 0.0 && e.y == 0.0) throw Error(ErrorCode::kZeroVector, "bearing of zero vector");
  double b = std::atan2(e.x, e.y) * 180.0 / std::numbers::pi;
  if (b < 0.0) b += 360.0;
  if (b >= 360.0) b -= 360.0;
  return b;
}

int bearing_to_clock(Vec2 e) { return bearing_deg_to_clock(bearing_deg(e)); }

std::optional<AudioCommand> encode_audio(Vec2 e, bool in_region, TimestampMs now_ms,
                                         const AudioState& state, const EncoderConfig& cfg) {
  const bool repeat_due =
      !state.last_prompt_ms || now_ms - *state.last_prompt_ms >= cfg.audio_repeat_ms;
  if (in_region) {
    if (!state.was_in_region || repeat_due) return AudioCommand::answer();
    return std::nullopt;
  }
  if (e.x == 0.0 && e.y == 0.0) return std::nullopt;
  const auto prompt = AudioCommand::clock(bearing_to_clock(e));
  if (state.last_prompt != prompt || repeat_due) return prompt;
  return std::nullopt;
}

FeedbackEncoder::FeedbackEncoder(Modality modality, EncoderConfig cfg)
    : modality_(modality), cfg_(cfg) {
  cfg_.validate();
}

void FeedbackEncoder::reset() {
  last_.reset();
  audio_ = {};
  was_in_region_ = false;
}

std::optional<FeedbackCommand> FeedbackEncoder::update(Vec2 e, bool in_region, TimestampMs now_ms) {
  const bool entered = in_region && !was_in_region_;
  was_in_region_ = in_region;
  switch (modality_) {
    case Modality::kHaptic: {
      HapticCommand cmd = encode_haptic(e, in_region, cfg_);
      if (entered && cmd.motors.empty()) cmd.pulse_ms = cfg_.success_pulse_ms;
      if (last_ && *last_ == FeedbackCommand{cmd}) return std::nullopt;
      last_ = cmd;
      return cmd;
    }
    case Modality::kVisual: {
      const VisualCommand cmd = encode_visual(e, in_region, cfg_);
      if (last_ && *last_ == FeedbackCommand{cmd}) return std::nullopt;
      last_ = cmd;
      return cmd;
    }
    case Modality::kAudio: {
      const auto cmd = encode_audio(e, in_region, now_ms, audio_, cfg_);
      audio_.was_in_region = in_region;
      if (!cmd) return std::nullopt;
      audio_.last_prompt = *cmd;
      audio_.last_prompt_ms = now_ms;
      last_ = *cmd;
      return *cmd;
    }
  }
  return std::nullopt;
}

}  // namespace copguide::feedback
