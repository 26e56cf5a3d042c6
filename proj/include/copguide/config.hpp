#pragma once

// Flat key=value configuration covering session, encoder, participant model
// and board settings. CLI flags override file values via AppConfig::set.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "copguide/feedback.hpp"
#include "copguide/guidance.hpp"
#include "copguide/participant_sim.hpp"
#include "copguide/sources.hpp"

namespace copguide::gateway {

struct AppConfig {
  guidance::SessionConfig session;
  feedback::EncoderConfig encoder;
  sim::ParticipantModel model = sim::ParticipantModel::defaults();
  board::SensorSettings sensor;

  /// Throws kInvalidConfig for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Every key with a value that parses back to the identical double.
  std::map<std::string, std::string> to_map() const;
  static AppConfig from_map(const std::map<std::string, std::string>& kv);

  void validate() const;
};

/// Lines are `key = value`; blank lines and `#` comments are ignored.
AppConfig load_config_file(const std::filesystem::path& path, AppConfig base = {});
AppConfig parse_config_text(std::string_view text, AppConfig base = {});

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace copguide::gateway
