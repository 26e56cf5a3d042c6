#pragma once

// The session loop: source -> guidance -> feedback, fanned out to observers.

#include <atomic>
#include <filesystem>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "copguide/feedback.hpp"
#include "copguide/guidance.hpp"
#include "copguide/participant_sim.hpp"
#include "copguide/sources.hpp"

namespace copguide {

/// Receives everything the loop produces, in order. Implementations must not
/// block the loop for long; slow consumers wrap themselves in an AsyncObserver.
class SessionObserver {
 public:
  virtual ~SessionObserver() = default;
  virtual void on_sample(const CoPSample& /*s*/) {}
  virtual void on_command(TimestampMs /*ts*/, const feedback::FeedbackCommand& /*cmd*/) {}
  virtual void on_event(const guidance::GuidanceEvent& /*e*/) {}
  virtual void on_trial(const guidance::TrialRecord& /*r*/) {}
  virtual void on_finish() {}
};

struct LoopOptions {
  bool keep_paths = true;
  // Checked once per sample; set from another thread to stop early.
  const std::atomic<bool>* abort = nullptr;
  // Sleep so sample timestamps track wall time (simulated sources under serve).
  bool realtime = false;
};

struct SessionOutcome {
  std::vector<guidance::TrialRecord> records;
  bool finished = false;
  bool aborted = false;
  std::size_t samples = 0;
  std::size_t out_of_order = 0;
};

SessionOutcome run_session_loop(const guidance::SessionConfig& cfg,
                                const feedback::EncoderConfig& enc, board::SampleSource& source,
                                std::span<SessionObserver* const> observers,
                                const LoopOptions& opts = {});

struct LiveSpec {
  std::filesystem::path device = "-";
  // Stamp frames k * tick period instead of wall time.
  bool tick_clock = false;
  int tick_hz = 100;
};

struct ReplaySpec {
  std::filesystem::path log;
};

struct SimulatedSpec {
  sim::ParticipantModel model;
  Modality modality = Modality::kHaptic;
  sim::SimOptions options;
};

using SourceSpec = std::variant<LiveSpec, ReplaySpec, SimulatedSpec>;

/// Throws kSourceUnavailable when a device or log cannot be opened.
std::unique_ptr<board::SampleSource> open_source(const SourceSpec& spec,
                                                 const board::SensorSettings& sensor);

}  // namespace copguide
