#include "copguide/participant_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "copguide/error.hpp"
#include "copguide/session.hpp"

namespace copguide::sim {

ParticipantModel ParticipantModel::defaults() {
  ParticipantModel m;
  m.params(Modality::kVisual) = {300.0, 60.0, 5.0, 4.0, 1.5, 0.48};
  m.params(Modality::kHaptic) = {400.0, 80.0, 15.0, 4.0, 0.0, 0.0};
  // Direction-only speech with no continuous feedback: a slower, more
  // cautious approach.
  m.params(Modality::kAudio) = {1200.0, 200.0, 20.0, 3.5, 0.0, 0.0};
  m.tremor_noise_cm = 0.02;
  return m;
}

ParticipantModel ParticipantModel::noiseless(double speed_cm_s) {
  ParticipantModel m;
  for (auto& p : m.per_modality) p = {0.0, 0.0, 0.0, speed_cm_s, 0.0, 0.0};
  return m;
}

void ParticipantModel::validate() const {
  for (const auto& p : per_modality) {
    if (p.latency_mean_ms < 0 || p.latency_std_ms < 0 || p.direction_noise_deg < 0 ||
        p.stop_deadband_cm < 0 || p.approach_gain_per_s < 0) {
      throw Error(ErrorCode::kInvalidConfig, "participant parameters must be non-negative");
    }
    if (!(p.speed_cm_s > 0)) throw Error(ErrorCode::kInvalidConfig, "speed_cm_s must be positive");
  }
  if (tremor_noise_cm < 0) throw Error(ErrorCode::kInvalidConfig, "tremor_noise_cm must be >= 0");
  if (!(body_mass_kg > 0)) throw Error(ErrorCode::kInvalidConfig, "body_mass_kg must be positive");
}

namespace {

double gaussian(Rng& rng, double std) {
  if (std <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, std)(rng);
}

Vec2 rotate(Vec2 v, double deg) {
  if (deg == 0.0) return v;
  const double r = deg * std::numbers::pi / 180.0;
  const double c = std::cos(r);
  const double s = std::sin(r);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

PerceivedDirection unit_with_noise(Vec2 v, const ModalityParams& params, Rng& rng) {
  const double n = norm(v);
  if (n == 0.0) return std::nullopt;
  return rotate({v.x / n, v.y / n}, gaussian(rng, params.direction_noise_deg));
}

// Exact axes for the quarter hours so 12 o'clock is precisely forward.
Vec2 clock_direction(int hour) {
  switch (hour % 12) {
    case 0: return {0.0, 1.0};
    case 3: return {1.0, 0.0};
    case 6: return {0.0, -1.0};
    case 9: return {-1.0, 0.0};
    default: {
      const double b = 30.0 * hour * std::numbers::pi / 180.0;
      return {std::sin(b), std::cos(b)};
    }
  }
}

}  // namespace

PerceivedDirection perceive(const feedback::FeedbackCommand& cmd, Modality expected,
                            const ModalityParams& params, Rng& rng, double visual_scale_cm) {
  using namespace feedback;
  if (modality_of(cmd) != expected) {
    throw Error(ErrorCode::kModalityMismatch,
                std::string("participant expects ") + std::string(to_string(expected)) +
                    " feedback, got " + std::string(to_string(modality_of(cmd))));
  }
  if (const auto* h = std::get_if<HapticCommand>(&cmd)) {
    if (h->pulse_ms > 0 || h->motors.empty()) return std::nullopt;
    Vec2 sum;
    if (h->motors.contains(Motor::kRight)) sum.x += 1.0;
    if (h->motors.contains(Motor::kLeft)) sum.x -= 1.0;
    if (h->motors.contains(Motor::kFront)) sum.y += 1.0;
    if (h->motors.contains(Motor::kBack)) sum.y -= 1.0;
    return unit_with_noise(sum, params, rng);
  }
  if (const auto* v = std::get_if<VisualCommand>(&cmd)) {
    const Vec2 p{v->px, v->py};
    if (v->in_region && norm(p) * visual_scale_cm <= params.stop_deadband_cm) return std::nullopt;
    return unit_with_noise(p, params, rng);
  }
  const auto& a = std::get<AudioCommand>(cmd);
  if (a.is_answer) return std::nullopt;
  return unit_with_noise(clock_direction(a.hour), params, rng);
}

std::optional<double> perceived_distance_cm(const feedback::FeedbackCommand& cmd,
                                            double visual_scale_cm) {
  if (const auto* v = std::get_if<feedback::VisualCommand>(&cmd)) {
    return norm({v->px, v->py}) * visual_scale_cm;
  }
  return std::nullopt;
}

Vec2 advance(Vec2 pos, const PerceivedDirection& dir, const ModalityParams& params,
             double tremor_noise_cm, double dt_s, Rng& rng, std::optional<double> distance_cm) {
  double speed = params.speed_cm_s;
  if (distance_cm && params.approach_gain_per_s > 0.0) {
    speed = std::min(speed, params.approach_gain_per_s * *distance_cm);
  }
  if (dir) pos = pos + *dir * (speed * dt_s);
  if (tremor_noise_cm > 0.0) {
    pos.x += gaussian(rng, tremor_noise_cm);
    pos.y += gaussian(rng, tremor_noise_cm);
  }
  return pos;
}

SimulatedSource::SimulatedSource(ParticipantModel model, Modality modality, SimOptions opts)
    : model_(model), modality_(modality), opts_(opts), rng_(model.seed), pos_(opts.start) {
  model_.validate();
  opts_.geom.validate();
}

void SimulatedSource::apply_matured(TimestampMs now) {
  const Pending* newest = nullptr;
  for (const auto& p : pending_) {
    if (p.effective <= now && (newest == nullptr || p.emitted > newest->emitted)) newest = &p;
  }
  if (newest == nullptr) return;
  const TimestampMs cutoff = newest->emitted;
  if (cutoff > applied_emit_) {
    dir_ = newest->dir;
    distance_cm_ = newest->distance_cm;
    applied_emit_ = cutoff;
  }
  std::erase_if(pending_, [cutoff](const Pending& p) { return p.emitted <= cutoff; });
}

std::optional<CoPSample> SimulatedSource::next() {
  const TimestampMs tick = std::max(1, 1000 / opts_.tick_hz);
  if (!ts_) {
    ts_ = opts_.start_ts;
  } else {
    apply_matured(*ts_);
    pos_ = advance(pos_, dir_, model_.params(modality_), model_.tremor_noise_cm,
                   static_cast<double>(tick) / 1000.0, rng_, distance_cm_);
    pos_.x = std::clamp(pos_.x, -0.5 * opts_.geom.length_x, 0.5 * opts_.geom.length_x);
    pos_.y = std::clamp(pos_.y, -0.5 * opts_.geom.length_y, 0.5 * opts_.geom.length_y);
    *ts_ += tick;
  }
  board::LoadSample loads;
  loads.ts = *ts_;
  loads.loads = board::loads_for_cop(pos_, model_.body_mass_kg, opts_.geom);
  return board::compute_cop(loads, opts_.geom, opts_.min_load_kg);
}

void SimulatedSource::on_feedback(TimestampMs ts, const feedback::FeedbackCommand& cmd) {
  const auto& params = model_.params(modality_);
  auto dir = perceive(cmd, modality_, params, rng_, opts_.visual_scale_cm);
  const double latency =
      std::max(0.0, params.latency_mean_ms + gaussian(rng_, params.latency_std_ms));
  pending_.push_back(
      {ts, ts + std::llround(latency), dir, perceived_distance_cm(cmd, opts_.visual_scale_cm)});
}

std::vector<guidance::TrialRecord> run_session(const ParticipantModel& model,
                                               const guidance::SessionConfig& cfg,
                                               const feedback::EncoderConfig& enc, bool keep_paths,
                                               const board::SensorSettings& sensor,
                                               std::span<SessionObserver* const> observers) {
  SimOptions opts;
  opts.tick_hz = cfg.tick_hz;
  opts.visual_scale_cm = enc.visual_scale_cm;
  opts.geom = sensor.geom;
  opts.min_load_kg = sensor.min_load_kg;
  SimulatedSource source(model, cfg.modality, opts);
  LoopOptions loop;
  loop.keep_paths = keep_paths;
  auto outcome = run_session_loop(cfg, enc, source, observers, loop);
  return std::move(outcome.records);
}

}  // namespace copguide::sim
