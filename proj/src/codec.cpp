#include "copguide/codec.hpp"

#include <string>

#include "copguide/error.hpp"

namespace copguide::gateway {

namespace {

[[noreturn]] void violation(const std::string& msg) {
  throw Error(ErrorCode::kSchemaViolation, msg);
}

const json& field(const json& j, const char* name) {
  if (!j.is_object()) violation("payload is not an object");
  const auto it = j.find(name);
  if (it == j.end()) violation(std::string("missing field '") + name + "'");
  return *it;
}

double number(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) violation(std::string("field '") + name + "' is not a number");
  return v.get<double>();
}

std::int64_t integer(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number_integer()) violation(std::string("field '") + name + "' is not an integer");
  return v.get<std::int64_t>();
}

bool boolean(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_boolean()) violation(std::string("field '") + name + "' is not a boolean");
  return v.get<bool>();
}

std::string string(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) violation(std::string("field '") + name + "' is not a string");
  return v.get<std::string>();
}

}  // namespace

json to_json(const CoPSample& s) {
  return {{"ts", s.ts},       {"x", s.x},
          {"y", s.y},         {"total", s.total_load},
          {"valid", s.valid}, {"kg", {s.loads[0], s.loads[1], s.loads[2], s.loads[3]}}};
}

json to_json(const feedback::FeedbackCommand& cmd) {
  using namespace feedback;
  if (const auto* h = std::get_if<HapticCommand>(&cmd)) {
    return {{"modality", "haptic"},
            {"motors", h->motors.names()},
            {"freq_hz", h->freq_hz},
            {"pulse_ms", h->pulse_ms}};
  }
  if (const auto* v = std::get_if<VisualCommand>(&cmd)) {
    return {{"modality", "visual"}, {"px", v->px}, {"py", v->py}, {"in_region", v->in_region}};
  }
  const auto& a = std::get<AudioCommand>(cmd);
  json j = {{"modality", "audio"}};
  if (a.is_answer) {
    j["prompt"] = "answer";
  } else {
    j["prompt"] = a.hour;
  }
  return j;
}

json to_json(const guidance::GuidanceEvent& e) {
  return {{"ts", e.ts},
          {"event", std::string(guidance::to_string(e.kind))},
          {"trial", e.trial_no},
          {"target", e.target_index}};
}

json to_json(const guidance::TrialRecord& r) {
  return {{"trial", r.trial_no},
          {"target", r.target.index},
          {"tx", r.target.x},
          {"ty", r.target.y},
          {"present_ts", r.present_ts},
          {"success_ts", r.success_ts},
          {"success", r.success},
          {"duration_s", r.duration_s},
          {"duration_ex_dwell_s", r.duration_ex_dwell_s}};
}

CoPSample sample_from_json(const json& j) {
  CoPSample s;
  s.ts = integer(j, "ts");
  s.x = number(j, "x");
  s.y = number(j, "y");
  s.total_load = number(j, "total");
  s.valid = boolean(j, "valid");
  const auto& kg = field(j, "kg");
  if (!kg.is_array() || kg.size() != 4) violation("field 'kg' must be an array of 4 numbers");
  for (std::size_t c = 0; c < 4; ++c) {
    if (!kg[c].is_number()) violation("field 'kg' must be an array of 4 numbers");
    s.loads[c] = kg[c].get<double>();
  }
  return s;
}

feedback::FeedbackCommand command_from_json(const json& j) {
  using namespace feedback;
  const auto modality = string(j, "modality");
  if (modality == "haptic") {
    HapticCommand h;
    const auto& motors = field(j, "motors");
    if (!motors.is_array()) violation("field 'motors' must be an array");
    for (const auto& m : motors) {
      if (!m.is_string()) violation("motor names must be strings");
      const auto motor = parse_motor(m.get<std::string>());
      if (!motor) violation("unknown motor '" + m.get<std::string>() + "'");
      h.motors.insert(*motor);
    }
    if ((h.motors.contains(Motor::kFront) && h.motors.contains(Motor::kBack)) ||
        (h.motors.contains(Motor::kLeft) && h.motors.contains(Motor::kRight))) {
      violation("opposing motors in one command");
    }
    h.freq_hz = static_cast<int>(integer(j, "freq_hz"));
    if (h.freq_hz != kGuideFreqHz && h.freq_hz != kInRegionFreqHz)
      violation("freq_hz must be 100 or 150");
    h.pulse_ms = static_cast<int>(integer(j, "pulse_ms"));
    if (h.pulse_ms < 0) violation("pulse_ms must be >= 0");
    return h;
  }
  if (modality == "visual") {
    VisualCommand v{number(j, "px"), number(j, "py"), boolean(j, "in_region")};
    if (std::abs(v.px) > 1.0 || std::abs(v.py) > 1.0) violation("visual offset outside [-1, 1]");
    return v;
  }
  if (modality == "audio") {
    const auto& prompt = field(j, "prompt");
    if (prompt.is_string() && prompt.get<std::string>() == "answer") return AudioCommand::answer();
    if (prompt.is_number_integer()) {
      const int hour = prompt.get<int>();
      if (hour >= 1 && hour <= 12) return AudioCommand::clock(hour);
    }
    violation("audio prompt must be 1..12 or \"answer\"");
  }
  violation("unknown modality '" + modality + "'");
}

guidance::GuidanceEvent event_from_json(const json& j) {
  guidance::GuidanceEvent e;
  e.ts = integer(j, "ts");
  const auto kind = guidance::parse_event_kind(string(j, "event"));
  if (!kind) violation("unknown event '" + string(j, "event") + "'");
  e.kind = *kind;
  e.trial_no = static_cast<int>(integer(j, "trial"));
  e.target_index = static_cast<int>(integer(j, "target"));
  if (e.target_index < 0 || e.target_index >= guidance::kTargetCount)
    violation("target out of range");
  return e;
}

guidance::TrialRecord trial_from_json(const json& j) {
  guidance::TrialRecord r;
  r.trial_no = static_cast<int>(integer(j, "trial"));
  r.target.index = static_cast<int>(integer(j, "target"));
  if (r.target.index < 0 || r.target.index >= guidance::kTargetCount)
    violation("target out of range");
  r.target.x = number(j, "tx");
  r.target.y = number(j, "ty");
  r.present_ts = integer(j, "present_ts");
  r.success_ts = integer(j, "success_ts");
  r.success = boolean(j, "success");
  r.duration_s = number(j, "duration_s");
  r.duration_ex_dwell_s = number(j, "duration_ex_dwell_s");
  if (r.duration_s < 0 || r.duration_ex_dwell_s < 0) violation("negative duration");
  return r;
}

}  // namespace copguide::gateway
