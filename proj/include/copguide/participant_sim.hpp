#pragma once

// Stochastic stand-in for the person on the board: perceives feedback with
// modality-specific latency and direction noise, and moves the CoP at a
// constant speed.

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "copguide/feedback.hpp"
#include "copguide/guidance.hpp"
#include "copguide/sources.hpp"

namespace copguide {
class SessionObserver;
}

namespace copguide::sim {

using Rng = std::mt19937_64;

struct ModalityParams {
  double latency_mean_ms = 0.0;
  double latency_std_ms = 0.0;
  double direction_noise_deg = 0.0;  // std of perceived-direction error
  double speed_cm_s = 4.0;
  // Visual only: hold once inside the region and the displayed error is
  // below this. Haptic and audio encodings carry no magnitude.
  double stop_deadband_cm = 0.0;
  // Visual only: speed is capped at gain * displayed error (cm/s per cm), so
  // the approach slows as the point nears the centre. 0 disables.
  double approach_gain_per_s = 0.0;
};

struct ParticipantModel {
  std::array<ModalityParams, 3> per_modality{};  // indexed by index_of(Modality)
  double tremor_noise_cm = 0.0;                  // per-tick jitter std, each axis
  double body_mass_kg = 65.0;
  std::uint64_t seed = 0;

  /// Calibrated defaults: latency visual 300 / haptic 400 / audio 1200 ms,
  /// direction noise 5 / 15 / 20 degrees, 4 cm/s (audio 3.5 cm/s), visual
  /// approach gain 0.48 /s. Synthetic values, not fitted to human data.
  static ParticipantModel defaults();
  /// All latencies, noise and tremor zeroed; speed kept.
  static ParticipantModel noiseless(double speed_cm_s = 4.0);

  ModalityParams& params(Modality m) { return per_modality[index_of(m)]; }
  const ModalityParams& params(Modality m) const { return per_modality[index_of(m)]; }
  void validate() const;
};

/// Unit vector the participant decides to move along, or nullopt to hold.
using PerceivedDirection = std::optional<Vec2>;

/// Error magnitude a command conveys, in cm. Only the visual encoding carries
/// one; nullopt otherwise.
std::optional<double> perceived_distance_cm(const feedback::FeedbackCommand& cmd,
                                            double visual_scale_cm = 10.0);

/// Throws kModalityMismatch when `cmd` is not of `expected` modality.
PerceivedDirection perceive(const feedback::FeedbackCommand& cmd, Modality expected,
                            const ModalityParams& params, Rng& rng, double visual_scale_cm = 10.0);

/// One kinematic step: pos + dir * speed * dt plus Gaussian tremor. With a
/// known error distance and a non-zero approach gain the speed is capped at
/// gain * distance.
Vec2 advance(Vec2 pos, const PerceivedDirection& dir, const ModalityParams& params,
             double tremor_noise_cm, double dt_s, Rng& rng,
             std::optional<double> distance_cm = std::nullopt);

struct SimOptions {
  int tick_hz = 100;
  board::BoardGeometry geom;
  double min_load_kg = board::kDefaultMinLoadKg;
  double visual_scale_cm = 10.0;
  Vec2 start{0.0, 0.0};
  TimestampMs start_ts = 0;
};

/// Closed-loop simulated source. Samples are synthesised as corner loads and
/// pass through the same compute_cop as live data.
class SimulatedSource : public board::SampleSource {
 public:
  SimulatedSource(ParticipantModel model, Modality modality, SimOptions opts = {});

  std::optional<CoPSample> next() override;
  void on_feedback(TimestampMs ts, const feedback::FeedbackCommand& cmd) override;
  std::string_view kind() const override { return "simulated"; }

  Vec2 position() const { return pos_; }
  const PerceivedDirection& direction() const { return dir_; }

 private:
  struct Pending {
    TimestampMs emitted;
    TimestampMs effective;
    PerceivedDirection dir;
    std::optional<double> distance_cm;
  };

  void apply_matured(TimestampMs now);

  ParticipantModel model_;
  Modality modality_;
  SimOptions opts_;
  Rng rng_;
  Vec2 pos_;
  PerceivedDirection dir_;
  std::optional<double> distance_cm_;
  TimestampMs applied_emit_ = -1;
  std::deque<Pending> pending_;
  std::optional<TimestampMs> ts_;
};

/// Runs one full session (all scheduled trials) against a simulated
/// participant. Deterministic in (model.seed, cfg.seed).
std::vector<guidance::TrialRecord> run_session(const ParticipantModel& model,
                                               const guidance::SessionConfig& cfg,
                                               const feedback::EncoderConfig& enc = {},
                                               bool keep_paths = true,
                                               const board::SensorSettings& sensor = {},
                                               std::span<SessionObserver* const> observers = {});

}  // namespace copguide::sim
