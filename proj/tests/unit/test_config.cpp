#include "copguide/config.hpp"
#include "copguide/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace copguide;
using namespace copguide::gateway;

TEST_CASE("set parses each key family") {
  AppConfig c;
  c.set("dwell_s", " 2.5 ");
  c.set("modality", "v");
  c.set("seed", "18446744073709551615");
  c.set("deadzone_cm", "0.75");
  c.set("audio.latency_mean_ms", "900");
  c.set("haptic.direction_noise_deg", "0");
  c.set("calibration.bl", "10, 1800, 3600");
  c.set("board_length_x_cm", "40");
  CHECK(c.session.dwell_s == 2.5);
  CHECK(c.session.modality == Modality::kVisual);
  CHECK(c.session.seed == 18446744073709551615ULL);
  CHECK(c.encoder.deadzone_cm == 0.75);
  CHECK(c.model.params(Modality::kAudio).latency_mean_ms == 900);
  CHECK(c.model.params(Modality::kHaptic).direction_noise_deg == 0);
  CHECK(c.sensor.calibration.refs[kBottomLeft] == std::array<std::uint16_t, 3>{10, 1800, 3600});
  CHECK(c.sensor.geom.length_x == 40);
}

TEST_CASE("bad keys and values are rejected") {
  AppConfig c;
  auto code = [&](const char* k, const char* v) {
    try {
      c.set(k, v);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kTransport;
  };
  CHECK(code("no_such_key", "1") == ErrorCode::kInvalidConfig);
  CHECK(code("dwell_s", "three") == ErrorCode::kInvalidConfig);
  CHECK(code("tick_hz", "100.5") == ErrorCode::kInvalidConfig);
  CHECK(code("calibration.tr", "1,2") == ErrorCode::kInvalidConfig);
  CHECK(code("calibration.xx", "1,2,3") == ErrorCode::kInvalidConfig);
  CHECK(code("visual.unknown", "1") == ErrorCode::kInvalidConfig);
  c = {};
  c.set("region_radius_cm", "-1");
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("to_map and from_map round-trip exactly") {
  AppConfig c;
  c.set("dwell_s", "0.1");
  c.set("visual.approach_gain_per_s", "0.3333333333333333");
  c.set("tremor_noise_cm", "1e-3");
  c.set("seed", "77");
  const auto m = c.to_map();
  const auto back = AppConfig::from_map(m);
  CHECK(back.to_map() == m);
  CHECK(back.session.dwell_s == c.session.dwell_s);
  CHECK(back.model.params(Modality::kVisual).approach_gain_per_s ==
        c.model.params(Modality::kVisual).approach_gain_per_s);
  CHECK(m.at("seed") == "77");
  CHECK(m.count("calibration.tr") == 1);
}

TEST_CASE("config text") {
  const auto c = parse_config_text(
      "# session\n"
      "dwell_s = 2\n"
      "\n"
      "  modality=audio   # trailing comments are fine\n"
      "audio.speed_cm_s = 3\n");
  CHECK(c.session.dwell_s == 2);
  CHECK(c.session.modality == Modality::kAudio);
  CHECK(c.model.params(Modality::kAudio).speed_cm_s == 3);
  CHECK_THROWS_AS(parse_config_text("dwell_s 2\n"), Error);

  copguide::testing::TempDir dir;
  {
    std::ofstream f(dir / "c.conf");
    f << "reps_per_target = 2\n";
  }
  CHECK(load_config_file(dir / "c.conf").session.reps_per_target == 2);
  CHECK_THROWS_AS(load_config_file(dir / "missing.conf"), Error);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(8.0) == "8");
  CHECK(format_double(-5.656854249492381) == "-5.656854249492381");
}
