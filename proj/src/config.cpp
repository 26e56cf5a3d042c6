#include "copguide/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "copguide/error.hpp"

namespace copguide::gateway {

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kInvalidConfig,
              "bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v);
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v);
  return out;
}

constexpr std::string_view kCornerKeys[] = {"tr", "br", "tl", "bl"};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void AppConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  auto& s = session;
  if (key == "target_radius_cm")
    s.target_radius_cm = to_double(key, value);
  else if (key == "region_radius_cm")
    s.region_radius_cm = to_double(key, value);
  else if (key == "dwell_s")
    s.dwell_s = to_double(key, value);
  else if (key == "reps_per_target")
    s.reps_per_target = to_int<int>(key, value);
  else if (key == "modality")
    s.modality = parse_modality(value);
  else if (key == "tick_hz")
    s.tick_hz = to_int<int>(key, value);
  else if (key == "seed")
    s.seed = to_int<std::uint64_t>(key, value);
  else if (key == "max_trial_s")
    s.max_trial_s = to_double(key, value);
  else if (key == "deadzone_cm")
    encoder.deadzone_cm = to_double(key, value);
  else if (key == "visual_scale_cm")
    encoder.visual_scale_cm = to_double(key, value);
  else if (key == "audio_repeat_ms")
    encoder.audio_repeat_ms = to_int<int>(key, value);
  else if (key == "success_pulse_ms")
    encoder.success_pulse_ms = to_int<int>(key, value);
  else if (key == "tremor_noise_cm")
    model.tremor_noise_cm = to_double(key, value);
  else if (key == "body_mass_kg")
    model.body_mass_kg = to_double(key, value);
  else if (key == "participant_seed")
    model.seed = to_int<std::uint64_t>(key, value);
  else if (key == "board_length_x_cm")
    sensor.geom.length_x = to_double(key, value);
  else if (key == "board_length_y_cm")
    sensor.geom.length_y = to_double(key, value);
  else if (key == "min_load_kg")
    sensor.min_load_kg = to_double(key, value);
  else if (key.starts_with("calibration.")) {
    const auto corner = key.substr(12);
    for (std::size_t c = 0; c < 4; ++c) {
      if (corner != kCornerKeys[c]) continue;
      std::array<std::uint16_t, 3> refs{};
      std::size_t i = 0;
      std::string_view rest = value;
      while (i < 3) {
        const auto comma = rest.find(',');
        refs[i++] = to_int<std::uint16_t>(key, trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (i != 3 || rest.find(',') != std::string_view::npos) bad(key, value);
      sensor.calibration.refs[c] = refs;
      return;
    }
    bad(key, value);
  } else {
    const auto dot = key.find('.');
    if (dot == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + std::string(key) + "'");
    }
    auto& p = model.params(parse_modality(key.substr(0, dot)));
    const auto field = key.substr(dot + 1);
    if (field == "latency_mean_ms")
      p.latency_mean_ms = to_double(key, value);
    else if (field == "latency_std_ms")
      p.latency_std_ms = to_double(key, value);
    else if (field == "direction_noise_deg")
      p.direction_noise_deg = to_double(key, value);
    else if (field == "speed_cm_s")
      p.speed_cm_s = to_double(key, value);
    else if (field == "stop_deadband_cm")
      p.stop_deadband_cm = to_double(key, value);
    else if (field == "approach_gain_per_s")
      p.approach_gain_per_s = to_double(key, value);
    else
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> AppConfig::to_map() const {
  std::map<std::string, std::string> kv;
  const auto& s = session;
  kv["target_radius_cm"] = format_double(s.target_radius_cm);
  kv["region_radius_cm"] = format_double(s.region_radius_cm);
  kv["dwell_s"] = format_double(s.dwell_s);
  kv["reps_per_target"] = std::to_string(s.reps_per_target);
  kv["modality"] = std::string(to_string(s.modality));
  kv["tick_hz"] = std::to_string(s.tick_hz);
  kv["seed"] = std::to_string(s.seed);
  kv["max_trial_s"] = format_double(s.max_trial_s);
  kv["deadzone_cm"] = format_double(encoder.deadzone_cm);
  kv["visual_scale_cm"] = format_double(encoder.visual_scale_cm);
  kv["audio_repeat_ms"] = std::to_string(encoder.audio_repeat_ms);
  kv["success_pulse_ms"] = std::to_string(encoder.success_pulse_ms);
  kv["tremor_noise_cm"] = format_double(model.tremor_noise_cm);
  kv["body_mass_kg"] = format_double(model.body_mass_kg);
  kv["participant_seed"] = std::to_string(model.seed);
  for (Modality m : kAllModalities) {
    const auto prefix = std::string(to_string(m)) + ".";
    const auto& p = model.params(m);
    kv[prefix + "latency_mean_ms"] = format_double(p.latency_mean_ms);
    kv[prefix + "latency_std_ms"] = format_double(p.latency_std_ms);
    kv[prefix + "direction_noise_deg"] = format_double(p.direction_noise_deg);
    kv[prefix + "speed_cm_s"] = format_double(p.speed_cm_s);
    kv[prefix + "stop_deadband_cm"] = format_double(p.stop_deadband_cm);
    kv[prefix + "approach_gain_per_s"] = format_double(p.approach_gain_per_s);
  }
  kv["board_length_x_cm"] = format_double(sensor.geom.length_x);
  kv["board_length_y_cm"] = format_double(sensor.geom.length_y);
  kv["min_load_kg"] = format_double(sensor.min_load_kg);
  for (std::size_t c = 0; c < 4; ++c) {
    const auto& r = sensor.calibration.refs[c];
    kv["calibration." + std::string(kCornerKeys[c])] =
        std::to_string(r[0]) + "," + std::to_string(r[1]) + "," + std::to_string(r[2]);
  }
  return kv;
}

AppConfig AppConfig::from_map(const std::map<std::string, std::string>& kv) {
  AppConfig cfg;
  for (const auto& [k, v] : kv) cfg.set(k, v);
  return cfg;
}

void AppConfig::validate() const {
  session.validate();
  encoder.validate();
  model.validate();
  sensor.geom.validate();
  sensor.calibration.validate();
  if (!(sensor.min_load_kg >= 0.0))
    throw Error(ErrorCode::kInvalidConfig, "min_load_kg must be >= 0");
}

AppConfig parse_config_text(std::string_view text, AppConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(lineno) + ": expected key=value");
    }
    base.set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  return base;
}

AppConfig load_config_file(const std::filesystem::path& path, AppConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

}  // namespace copguide::gateway
