#include "copguide/session.hpp"

#include <chrono>
#include <thread>

#include "copguide/error.hpp"

namespace copguide {

SessionOutcome run_session_loop(const guidance::SessionConfig& cfg,
                                const feedback::EncoderConfig& enc, board::SampleSource& source,
                                std::span<SessionObserver* const> observers,
                                const LoopOptions& opts) {
  guidance::SessionState state(cfg);
  state.set_keep_paths(opts.keep_paths);
  feedback::FeedbackEncoder encoder(cfg.modality, enc);
  SessionOutcome out;

  const auto wall_start = std::chrono::steady_clock::now();
  std::optional<TimestampMs> first_ts;

  while (!state.finished()) {
    if (opts.abort != nullptr && opts.abort->load(std::memory_order_relaxed)) {
      out.aborted = true;
      break;
    }
    auto sample = source.next();
    if (!sample) break;
    ++out.samples;
    if (opts.realtime) {
      if (!first_ts) first_ts = sample->ts;
      std::this_thread::sleep_until(wall_start + std::chrono::milliseconds(sample->ts - *first_ts));
    }
    for (auto* o : observers) o->on_sample(*sample);

    guidance::StepResult step;
    try {
      step = state.step(*sample);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kOutOfOrderSample) throw;
      ++out.out_of_order;
      continue;
    }
    for (const auto& ev : step.events) {
      if (ev.kind == guidance::EventKind::kTrialPresented) encoder.reset();
      for (auto* o : observers) o->on_event(ev);
    }
    if (step.completed) {
      for (auto* o : observers) o->on_trial(*step.completed);
      out.records.push_back(std::move(*step.completed));
    }
    // Invalid samples hold the previous guidance.
    if (!sample->valid || !state.active_target()) continue;
    const Vec2 e = state.error_vector(*sample);
    if (auto cmd = encoder.update(e, state.in_region(), sample->ts)) {
      for (auto* o : observers) o->on_command(sample->ts, *cmd);
      source.on_feedback(sample->ts, *cmd);
    }
  }
  out.finished = state.finished();
  for (auto* o : observers) o->on_finish();
  return out;
}

std::unique_ptr<board::SampleSource> open_source(const SourceSpec& spec,
                                                 const board::SensorSettings& sensor) {
  struct Visitor {
    const board::SensorSettings& sensor;

    std::unique_ptr<board::SampleSource> operator()(const LiveSpec& s) const {
      auto clock = s.tick_clock ? board::LiveSource::tick_clock(1000 / s.tick_hz)
                                : board::LiveSource::steady_clock();
      return std::make_unique<board::LiveSource>(s.device, sensor, std::move(clock));
    }
    std::unique_ptr<board::SampleSource> operator()(const ReplaySpec& s) const {
      return std::make_unique<board::ReplaySource>(s.log, sensor);
    }
    std::unique_ptr<board::SampleSource> operator()(const SimulatedSpec& s) const {
      auto opts = s.options;
      opts.geom = sensor.geom;
      opts.min_load_kg = sensor.min_load_kg;
      return std::make_unique<sim::SimulatedSource>(s.model, s.modality, opts);
    }
  };
  return std::visit(Visitor{sensor}, spec);
}

}  // namespace copguide
