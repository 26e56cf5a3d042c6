#include <cmath>
#include <numbers>

#include "copguide/error.hpp"
#include "copguide/feedback.hpp"
#include "doctest.h"

using namespace copguide;
using namespace copguide::feedback;

namespace {

// Integer-arithmetic clock oracle: nearest hour, ties up, 0 -> 12.
int clock_oracle(int bearing) {
  const int h = ((bearing + 15) / 30) % 12;
  return h == 0 ? 12 : h;
}

Vec2 at_bearing(double deg, double r = 5.0) {
  const double rad = deg * std::numbers::pi / 180.0;
  return {r * std::sin(rad), r * std::cos(rad)};
}

}  // namespace

TEST_CASE("haptic examples") {
  const EncoderConfig cfg;
  auto c = encode_haptic({8, 8}, false, cfg);
  CHECK(c.motors == MotorSet{Motor::kFront, Motor::kRight});
  CHECK(c.freq_hz == 100);
  c = encode_haptic({0, 0}, true, cfg);
  CHECK(c.motors.empty());
  CHECK(c.freq_hz == 150);
  c = encode_haptic({0.5, -3}, false, cfg);
  CHECK(c.motors == MotorSet{Motor::kBack});
  // Deadzone edge is exclusive.
  CHECK(encode_haptic({1.0, -1.0}, false, cfg).motors.empty());
}

TEST_CASE("haptic grid follows the axis truth table") {
  const EncoderConfig cfg;
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      const Vec2 e{i * 0.5, j * 0.5};
      for (bool in : {false, true}) {
        const auto c = encode_haptic(e, in, cfg);
        CHECK(c.motors.contains(Motor::kRight) == (e.x > 1.0));
        CHECK(c.motors.contains(Motor::kLeft) == (e.x < -1.0));
        CHECK(c.motors.contains(Motor::kFront) == (e.y > 1.0));
        CHECK(c.motors.contains(Motor::kBack) == (e.y < -1.0));
        CHECK_FALSE((c.motors.contains(Motor::kFront) && c.motors.contains(Motor::kBack)));
        CHECK_FALSE((c.motors.contains(Motor::kLeft) && c.motors.contains(Motor::kRight)));
        CHECK(c.motors.empty() == (std::abs(e.x) <= 1.0 && std::abs(e.y) <= 1.0));
        CHECK((c.freq_hz == 150) == in);
      }
    }
  }
}

TEST_CASE("motor names") {
  const MotorSet s{Motor::kLeft, Motor::kFront};
  CHECK(s.size() == 2);
  CHECK(s.names() == std::vector<std::string>{"front", "left"});
  for (auto m : kAllMotors) CHECK(parse_motor(to_string(m)) == m);
  CHECK_FALSE(parse_motor("up"));
}

TEST_CASE("visual encoding scales and clamps") {
  const EncoderConfig cfg;
  CHECK(encode_visual({0, 0}, true, cfg) == VisualCommand{0, 0, true});
  CHECK(encode_visual({10, -5}, false, cfg) == VisualCommand{1.0, -0.5, false});
  CHECK(encode_visual({25, 0}, false, cfg) == VisualCommand{1.0, 0.0, false});
  for (int i = -100; i <= 100; ++i) {
    const double ex = i * 0.1;
    const auto c = encode_visual({ex, -ex}, false, cfg);
    CHECK(c.px * cfg.visual_scale_cm == doctest::Approx(ex));
    CHECK(std::abs(c.py) <= 1.0);
  }
}

TEST_CASE("clock mapping matches the oracle at every integer bearing") {
  for (int b = 0; b < 360; ++b) CHECK(bearing_deg_to_clock(b) == clock_oracle(b));
  CHECK(bearing_deg_to_clock(60) == 2);
  CHECK(bearing_deg_to_clock(344) == 11);
  CHECK(bearing_deg_to_clock(15) == 1);  // tie rounds up
  CHECK(bearing_deg_to_clock(345) == 12);
  CHECK(bearing_to_clock({0, 5}) == 12);
  CHECK(bearing_to_clock({5, 0}) == 3);
  CHECK(bearing_to_clock({0, -5}) == 6);
  CHECK(bearing_to_clock({-5, 0}) == 9);
  CHECK_THROWS_AS(bearing_to_clock({0, 0}), Error);
}

TEST_CASE("rotating by 30 degrees advances the hour") {
  for (int b = 0; b < 360; ++b) {
    if (b % 30 == 15) continue;  // tie boundary
    const int h0 = bearing_to_clock(at_bearing(b + 0.25));
    const int h1 = bearing_to_clock(at_bearing(b + 30.25));
    CHECK(h1 == h0 % 12 + 1);
  }
}

TEST_CASE("audio prompts") {
  const EncoderConfig cfg;
  AudioState st;
  // Region entry says Answer at once.
  CHECK(encode_audio({0, 0}, true, 0, st, cfg) == AudioCommand::answer());
  st = {0, AudioCommand::answer(), true};
  CHECK_FALSE(encode_audio({0, 0}, true, 1000, st, cfg));
  CHECK(encode_audio({0, 0}, true, 1500, st, cfg) == AudioCommand::answer());

  st = {1000, AudioCommand::clock(2), false};
  CHECK_FALSE(encode_audio(at_bearing(60), false, 1400, st, cfg));
  CHECK(encode_audio(at_bearing(90), false, 1400, st, cfg) == AudioCommand::clock(3));
  CHECK(encode_audio(at_bearing(60), false, 2500, st, cfg) == AudioCommand::clock(2));
}

TEST_CASE("encoder emits on change and pulses on silent region entry") {
  FeedbackEncoder h(Modality::kHaptic, {});
  auto c = h.update({5, 0}, false, 0);
  REQUIRE(c);
  CHECK(std::get<HapticCommand>(*c).motors == MotorSet{Motor::kRight});
  CHECK_FALSE(h.update({4, 0}, false, 10));
  c = h.update({0.2, 0.1}, true, 20);
  REQUIRE(c);
  CHECK(std::get<HapticCommand>(*c).pulse_ms == 200);
  CHECK(std::get<HapticCommand>(*c).freq_hz == 150);
  CHECK(std::get<HapticCommand>(*c).motors.empty());
  c = h.update({0.2, 0.1}, true, 30);
  REQUIRE(c);
  CHECK(std::get<HapticCommand>(*c).pulse_ms == 0);
  CHECK_FALSE(h.update({0.3, 0.1}, true, 40));

  // Entering with a motor still active carries 150 Hz on it, no pulse.
  FeedbackEncoder h2(Modality::kHaptic, {});
  h2.update({5, 0}, false, 0);
  c = h2.update({2, 0}, true, 10);
  REQUIRE(c);
  CHECK(std::get<HapticCommand>(*c) == HapticCommand{MotorSet{Motor::kRight}, 150, 0});

  FeedbackEncoder v(Modality::kVisual, {});
  CHECK(v.update({1, 1}, false, 0));
  CHECK_FALSE(v.update({1, 1}, false, 10));
  CHECK(v.update({1, 2}, false, 20));
  v.reset();
  CHECK(v.update({1, 2}, false, 30));

  FeedbackEncoder a(Modality::kAudio, {});
  CHECK(a.update(at_bearing(60), false, 0) == FeedbackCommand{AudioCommand::clock(2)});
  CHECK_FALSE(a.update(at_bearing(61), false, 400));
  CHECK(a.update(at_bearing(61), false, 1500) == FeedbackCommand{AudioCommand::clock(2)});
  CHECK(a.update({0, 0}, true, 1600) == FeedbackCommand{AudioCommand::answer()});
  CHECK(modality_of(AudioCommand::answer()) == Modality::kAudio);
  CHECK(modality_of(VisualCommand{}) == Modality::kVisual);
}

TEST_CASE("encoder config validation") {
  EncoderConfig cfg;
  cfg.visual_scale_cm = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.deadzone_cm = -1;
  CHECK_THROWS_AS(FeedbackEncoder(Modality::kHaptic, cfg), Error);
}
