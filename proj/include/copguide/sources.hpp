#pragma once

// Sample sources behind one pull interface: live frame stream, replay log,
// and (in participant_sim) the closed-loop simulated participant.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "copguide/board.hpp"
#include "copguide/feedback.hpp"

namespace copguide::board {

/// Single-producer, single-consumer ordered stream of CoP samples.
class SampleSource {
 public:
  virtual ~SampleSource() = default;

  /// Next sample, or nullopt at end of stream.
  virtual std::optional<CoPSample> next() = 0;

  /// Closed-loop sources react to the guidance they are given.
  virtual void on_feedback(TimestampMs /*ts*/, const feedback::FeedbackCommand& /*cmd*/) {}

  virtual std::string_view kind() const = 0;
  virtual std::size_t malformed_lines() const { return 0; }
};

struct SensorSettings {
  BoardGeometry geom;
  CalibrationTable calibration;
  double min_load_kg = kDefaultMinLoadKg;
};

/// Replays a log. Each line is a JSON object carrying `ts` (or `ts_ms`) and
/// either calibrated corner loads (`kg`: [tr, br, tl, bl], or the flat
/// `tr_kg`, `br_kg`, `tl_kg`, `bl_kg`) or a raw frame (`raw`: 16 hex
/// digits). Lines with a `type` other than "sample" are skipped silently;
/// anything else unparsable is counted and skipped.
class ReplaySource : public SampleSource {
 public:
  ReplaySource(const std::filesystem::path& path, SensorSettings settings);

  std::optional<CoPSample> next() override;
  std::string_view kind() const override { return "replay"; }
  std::size_t malformed_lines() const override { return malformed_; }
  std::size_t calibrated_lines() const { return calibrated_; }
  std::size_t raw_lines() const { return raw_; }

 private:
  std::ifstream in_;
  SensorSettings settings_;
  std::size_t malformed_ = 0;
  std::size_t calibrated_ = 0;
  std::size_t raw_ = 0;
  std::optional<TimestampMs> last_ts_;
};

/// Reads fixed 8-octet frames from a byte stream (device node, FIFO, file or
/// stdin). Timestamps come from `clock`.
class LiveSource : public SampleSource {
 public:
  using Clock = std::function<TimestampMs()>;

  LiveSource(const std::filesystem::path& device, SensorSettings settings, Clock clock);
  ~LiveSource() override;
  LiveSource(const LiveSource&) = delete;
  LiveSource& operator=(const LiveSource&) = delete;

  std::optional<CoPSample> next() override;
  std::string_view kind() const override { return "live"; }
  std::size_t truncated_frames() const { return truncated_; }

  /// Wall-clock milliseconds since construction of the returned clock.
  static Clock steady_clock();
  /// k-th read is stamped k * period_ms; for file-backed devices.
  static Clock tick_clock(TimestampMs period_ms);

 private:
  std::FILE* file_ = nullptr;
  bool owns_ = false;
  SensorSettings settings_;
  Clock clock_;
  std::size_t truncated_ = 0;
};

}  // namespace copguide::board
