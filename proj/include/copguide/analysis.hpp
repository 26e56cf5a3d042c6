#pragma once

// From session logs (or in-memory cohort runs) to a StatsReport, and the
// report's JSON and text renderings.

#include <filesystem>
#include <string>
#include <vector>

#include "copguide/cohort.hpp"
#include "copguide/log.hpp"
#include "copguide/stats.hpp"

namespace copguide::gateway {

struct TrialRow {
  std::string participant;
  Modality modality = Modality::kHaptic;
  int trial_no = 0;
  int target_index = 0;
  bool success = true;
  double duration_s = 0.0;
  double duration_ex_dwell_s = 0.0;
};

struct AnalysisInput {
  std::vector<TrialRow> trials;
  std::vector<DifficultyEntry> difficulty;
  std::vector<std::string> sources;  // source kind per session
};

enum class Unit {
  kParticipantMeans,  // default: one paired unit per participant
  kPooledTrials,      // pairs trials by (participant, target, repetition)
};

std::string participant_id(int participant);

AnalysisInput rows_from_runs(const std::vector<sim::SessionRun>& runs);
/// Malformed or torn lines are skipped; trials come from `trial` lines.
AnalysisInput rows_from_logs(const std::vector<std::filesystem::path>& logs);

/// Failed (timed-out) trials are excluded from durations and counted in
/// the report notes. Throws kTooFewSamples when fewer than two paired units
/// remain.
stats::StatsReport analyze(const AnalysisInput& input, Unit unit = Unit::kParticipantMeans,
                           double alpha = 0.05);

/// True when (haptic, audio) and (visual, audio) are significant and
/// (haptic, visual) is not, after adjustment.
bool audio_gap_pattern(const stats::StatsReport& report);

json report_to_json(const stats::StatsReport& report);
/// Fixed-width table: modality, n, mean +- std (with and without dwell),
/// then each pair with t, df, raw and adjusted p, and a significance marker.
std::string report_to_text(const stats::StatsReport& report);

}  // namespace copguide::gateway
