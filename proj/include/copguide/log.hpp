#pragma once

// Session logs: one JSON object per line, header first. Each line is written
// whole and parses on its own, so any prefix ending at a newline is a valid
// log.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copguide/codec.hpp"
#include "copguide/config.hpp"
#include "copguide/session.hpp"

namespace copguide::gateway {

inline constexpr std::string_view kLogSchema = "copguide-log/1";

struct LogHeader {
  std::string participant = "P01";
  Modality modality = Modality::kHaptic;
  std::uint64_t seed = 0;
  std::string source = "live";
  AppConfig config;
};

json header_to_json(const LogHeader& h);
LogHeader header_from_json(const json& j);

struct DifficultyEntry {
  std::string participant;
  Modality modality = Modality::kHaptic;
  int rating = 0;
};

/// Writes a session log as the loop runs. Lines go to the stream as soon as
/// they are produced; the stream is flushed every `flush_every` lines and at
/// finish.
class LogWriter : public SessionObserver {
 public:
  LogWriter(const std::filesystem::path& path, const LogHeader& header,
            std::size_t flush_every = 256);

  void on_sample(const CoPSample& s) override;
  void on_command(TimestampMs ts, const feedback::FeedbackCommand& cmd) override;
  void on_event(const guidance::GuidanceEvent& e) override;
  void on_trial(const guidance::TrialRecord& r) override;
  void on_finish() override;

  const std::filesystem::path& path() const { return path_; }

 private:
  void write(const json& j);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t flush_every_;
  std::size_t pending_ = 0;
  std::size_t trials_ = 0;
  TimestampMs last_ts_ = 0;
};

/// Appends a difficulty rating to an existing log's footer. Rejects ratings
/// outside 1..7 with kSchemaViolation.
void append_difficulty(const std::filesystem::path& log, const DifficultyEntry& entry,
                       TimestampMs ts);

struct ParsedLog {
  LogHeader header;
  std::vector<guidance::TrialRecord> trials;
  std::vector<guidance::GuidanceEvent> events;
  std::vector<CoPSample> samples;  // only when requested
  std::vector<DifficultyEntry> difficulty;
  bool complete = false;   // end line present
  bool torn_tail = false;  // last line lacked its newline
  std::size_t malformed = 0;
};

/// Throws kMalformedLogLine if the header is missing or of another schema.
/// Unparsable body lines are counted, not fatal.
ParsedLog read_log(const std::filesystem::path& path, bool with_samples = false);

}  // namespace copguide::gateway
