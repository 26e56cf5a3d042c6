#pragma once

// Trial state machine: target ring, randomised schedule, dwell detection and
// trial timing.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "copguide/types.hpp"

namespace copguide::guidance {

inline constexpr int kTargetCount = 8;

struct Target {
  int index = 0;
  double x = 0.0;
  double y = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Target&, const Target&) = default;
};

struct SessionConfig {
  double target_radius_cm = 8.0;
  double region_radius_cm = 3.0;
  double dwell_s = 3.0;
  int reps_per_target = 3;
  Modality modality = Modality::kHaptic;
  int tick_hz = 100;
  std::uint64_t seed = 0;
  // A trial not completed within this window is closed as failed.
  double max_trial_s = 60.0;

  void validate() const;
  TimestampMs dwell_ms() const;
  TimestampMs max_trial_ms() const;
  TimestampMs tick_ms() const;
  int trial_count() const { return kTargetCount * reps_per_target; }
};

std::array<Target, kTargetCount> make_targets(const SessionConfig& cfg);

/// Seeded uniform shuffle of {0,0,0,1,1,1,...,7,7,7} (reps copies of each).
std::vector<int> make_schedule(const SessionConfig& cfg);

enum class PhaseKind { kPresenting, kGuiding, kDwelling, kComplete };

std::string_view to_string(PhaseKind p);

struct TrialPhase {
  PhaseKind kind = PhaseKind::kPresenting;
  // entered_ts while Dwelling, success/end ts when Complete.
  TimestampMs since = 0;
};

struct TrialRecord {
  int trial_no = 0;
  Target target;
  TimestampMs present_ts = 0;
  TimestampMs success_ts = 0;  // end of trial; the timeout instant when !success
  bool success = true;
  double duration_s = 0.0;
  double duration_ex_dwell_s = 0.0;
  std::vector<CoPSample> path;
};

enum class EventKind {
  kTrialPresented,
  kRegionEntered,
  kRegionExited,
  kTrialComplete,
  kSessionFinished,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct GuidanceEvent {
  EventKind kind = EventKind::kTrialPresented;
  TimestampMs ts = 0;
  int trial_no = 0;
  int target_index = 0;

  friend bool operator==(const GuidanceEvent&, const GuidanceEvent&) = default;
};

struct StepResult {
  std::vector<GuidanceEvent> events;
  std::optional<TrialRecord> completed;
};

/// Session state for one modality run. Copyable; step() depends only on the
/// state and the sample.
class SessionState {
 public:
  explicit SessionState(SessionConfig cfg);

  /// Advances the machine by one sample. Throws kOutOfOrderSample (state
  /// untouched) when the sample predates the last one, kSessionFinished once
  /// every scheduled trial is closed.
  StepResult step(const CoPSample& s);

  /// (target - cop). Throws kNoActiveTarget between trials and after the end.
  Vec2 error_vector(const CoPSample& s) const;

  std::optional<Target> active_target() const;
  bool in_region() const { return phase_.kind == PhaseKind::kDwelling; }
  bool finished() const { return finished_; }
  const TrialPhase& phase() const { return phase_; }
  int trial_no() const { return trial_; }
  const std::vector<int>& schedule() const { return schedule_; }
  const SessionConfig& config() const { return cfg_; }
  std::size_t ignored_invalid() const { return ignored_invalid_; }

  /// When false, TrialRecord::path is left empty (bulk Monte Carlo runs).
  void set_keep_paths(bool keep) { keep_paths_ = keep; }

 private:
  TrialRecord close_trial(TimestampMs ts, bool success);

  SessionConfig cfg_;
  std::array<Target, kTargetCount> targets_;
  std::vector<int> schedule_;
  int trial_ = 0;
  TrialPhase phase_;
  TimestampMs present_ts_ = 0;
  std::optional<TimestampMs> last_ts_;
  std::vector<CoPSample> path_;
  bool finished_ = false;
  bool keep_paths_ = true;
  std::size_t ignored_invalid_ = 0;
};

/// Functional form of SessionState::step.
std::pair<SessionState, StepResult> step(SessionState state, const CoPSample& s);

}  // namespace copguide::guidance
