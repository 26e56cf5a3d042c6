#pragma once

// Cohort simulation: participants x modalities, each an independent seeded
// session. simulate_cohort runs sessions in parallel (OpenMP);
// simulate_cohort_serial is the reference the tests compare it against.

#include <cstdint>
#include <vector>

#include "copguide/feedback.hpp"
#include "copguide/guidance.hpp"
#include "copguide/participant_sim.hpp"

namespace copguide::sim {

struct CohortSpec {
  int participants = 6;
  std::uint64_t seed = 1;
  std::vector<Modality> modalities{kAllModalities.begin(), kAllModalities.end()};
  guidance::SessionConfig session;
  feedback::EncoderConfig encoder;
  ParticipantModel model = ParticipantModel::defaults();
  board::SensorSettings sensor;
  // Per-participant multiplicative spread on latency, speed and direction
  // noise: each factor is uniform in [1 - jitter, 1 + jitter].
  double jitter = 0.10;
  bool keep_paths = true;
};

struct SessionPlan {
  int participant = 0;  // 1-based
  Modality modality = Modality::kHaptic;
  guidance::SessionConfig session;
  ParticipantModel model;
};

struct SessionRun {
  SessionPlan plan;
  std::vector<guidance::TrialRecord> records;
};

/// splitmix64 over the mixed inputs; stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Participant-major, modality-minor order; every plan is fully seeded.
std::vector<SessionPlan> plan_cohort(const CohortSpec& spec);

std::vector<SessionRun> simulate_cohort(const CohortSpec& spec);
std::vector<SessionRun> simulate_cohort_serial(const CohortSpec& spec);

}  // namespace copguide::sim
