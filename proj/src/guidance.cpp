#include "copguide/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "copguide/error.hpp"

namespace copguide::guidance {

void SessionConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (!(target_radius_cm > 0.0)) fail("target_radius_cm must be positive");
  if (!(region_radius_cm > 0.0 && region_radius_cm < target_radius_cm)) {
    fail("region_radius_cm must be in (0, target_radius_cm)");
  }
  if (!(dwell_s > 0.0)) fail("dwell_s must be positive");
  if (reps_per_target < 1) fail("reps_per_target must be at least 1");
  if (tick_hz < 1 || tick_hz > 1000) fail("tick_hz must be in 1..1000");
  if (!(max_trial_s > dwell_s)) fail("max_trial_s must exceed dwell_s");
}

TimestampMs SessionConfig::dwell_ms() const { return std::llround(dwell_s * 1000.0); }
TimestampMs SessionConfig::max_trial_ms() const { return std::llround(max_trial_s * 1000.0); }
TimestampMs SessionConfig::tick_ms() const { return std::max(1, 1000 / tick_hz); }

std::array<Target, kTargetCount> make_targets(const SessionConfig& cfg) {
  std::array<Target, kTargetCount> out;
  for (int i = 0; i < kTargetCount; ++i) {
    const double angle = i * std::numbers::pi / 4.0;
    double x = cfg.target_radius_cm * std::cos(angle);
    double y = cfg.target_radius_cm * std::sin(angle);
    // Exact zeros on the axes instead of 1e-16 residue.
    if (i % 4 == 2) x = 0.0;
    if (i % 4 == 0) y = 0.0;
    out[i] = {i, x, y};
  }
  return out;
}

namespace {

// Uniform draw in [0, n) by rejection; unlike the standard distributions its
// output is the same on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = (0 - n) % n;
  std::uint64_t r = rng();
  while (r < limit) r = rng();
  return r % n;
}

}  // namespace

std::vector<int> make_schedule(const SessionConfig& cfg) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(cfg.trial_count()));
  for (int t = 0; t < kTargetCount; ++t) {
    for (int r = 0; r < cfg.reps_per_target; ++r) order.push_back(t);
  }
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[bounded(rng, i)]);
  }
  return order;
}

std::string_view to_string(PhaseKind p) {
  switch (p) {
    case PhaseKind::kPresenting: return "presenting";
    case PhaseKind::kGuiding: return "guiding";
    case PhaseKind::kDwelling: return "dwelling";
    case PhaseKind::kComplete: return "complete";
  }
  return "unknown";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kTrialPresented: return "trial_presented";
    case EventKind::kRegionEntered: return "region_entered";
    case EventKind::kRegionExited: return "region_exited";
    case EventKind::kTrialComplete: return "trial_complete";
    case EventKind::kSessionFinished: return "session_finished";
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::kTrialPresented, EventKind::kRegionEntered, EventKind::kRegionExited,
                 EventKind::kTrialComplete, EventKind::kSessionFinished}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

SessionState::SessionState(SessionConfig cfg)
    : cfg_(cfg), targets_(make_targets(cfg)), schedule_(make_schedule(cfg)) {
  cfg_.validate();
}

std::optional<Target> SessionState::active_target() const {
  if (finished_ || phase_.kind == PhaseKind::kComplete) return std::nullopt;
  return targets_[schedule_[trial_]];
}

Vec2 SessionState::error_vector(const CoPSample& s) const {
  const auto target = active_target();
  if (!target) throw Error(ErrorCode::kNoActiveTarget, "no active target");
  return {target->x - s.x, target->y - s.y};
}

TrialRecord SessionState::close_trial(TimestampMs ts, bool success) {
  TrialRecord rec;
  rec.trial_no = trial_;
  rec.target = targets_[schedule_[trial_]];
  rec.present_ts = present_ts_;
  rec.success_ts = ts;
  rec.success = success;
  rec.duration_s = static_cast<double>(ts - present_ts_) / 1000.0;
  rec.duration_ex_dwell_s = std::max(0.0, rec.duration_s - cfg_.dwell_s);
  rec.path = std::move(path_);
  path_.clear();
  phase_ = {PhaseKind::kComplete, ts};
  return rec;
}

StepResult SessionState::step(const CoPSample& s) {
  if (finished_) throw Error(ErrorCode::kSessionFinished, "session already finished");
  if (last_ts_ && s.ts < *last_ts_) {
    throw Error(ErrorCode::kOutOfOrderSample,
                "sample ts " + std::to_string(s.ts) + " precedes " + std::to_string(*last_ts_));
  }
  const bool fresh_ts = !last_ts_ || s.ts > *last_ts_;
  last_ts_ = s.ts;

  StepResult out;
  if (phase_.kind == PhaseKind::kComplete) {
    ++trial_;
    phase_ = {PhaseKind::kPresenting, s.ts};
  }
  if (phase_.kind == PhaseKind::kPresenting) {
    present_ts_ = s.ts;
    phase_ = {PhaseKind::kGuiding, s.ts};
    out.events.push_back({EventKind::kTrialPresented, s.ts, trial_, schedule_[trial_]});
  }
  const int current = schedule_[trial_];

  if (keep_paths_ && (fresh_ts || path_.empty())) path_.push_back(s);

  if (!s.valid) {
    ++ignored_invalid_;
  } else {
    const Target& target = targets_[current];
    const double d = std::hypot(s.x - target.x, s.y - target.y);
    const bool inside = d <= cfg_.region_radius_cm;
    if (phase_.kind == PhaseKind::kGuiding && inside) {
      phase_ = {PhaseKind::kDwelling, s.ts};
      out.events.push_back({EventKind::kRegionEntered, s.ts, trial_, current});
    } else if (phase_.kind == PhaseKind::kDwelling && !inside) {
      phase_ = {PhaseKind::kGuiding, s.ts};
      out.events.push_back({EventKind::kRegionExited, s.ts, trial_, current});
    } else if (phase_.kind == PhaseKind::kDwelling && s.ts - phase_.since >= cfg_.dwell_ms()) {
      out.events.push_back({EventKind::kTrialComplete, s.ts, trial_, current});
      out.completed = close_trial(s.ts, true);
    }
  }

  if (!out.completed && s.ts - present_ts_ >= cfg_.max_trial_ms()) {
    out.events.push_back({EventKind::kTrialComplete, s.ts, trial_, current});
    out.completed = close_trial(s.ts, false);
  }

  if (out.completed && trial_ + 1 >= static_cast<int>(schedule_.size())) {
    finished_ = true;
    out.events.push_back({EventKind::kSessionFinished, s.ts, trial_, current});
  }
  return out;
}

std::pair<SessionState, StepResult> step(SessionState state, const CoPSample& s) {
  StepResult r = state.step(s);
  return {std::move(state), std::move(r)};
}

}  // namespace copguide::guidance
