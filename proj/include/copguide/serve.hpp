#pragma once

// Telemetry and control backend for the trainer UI.
//
//   GET  /stream   server-sent events, one bus message (to_wire JSON) per event
//   POST /control  {"verb": ...} control verbs, see SessionController::handle
//   GET  /status   controller state
//   GET  /*        static UI assets when a static directory is configured

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "copguide/bus.hpp"
#include "copguide/config.hpp"
#include "copguide/log.hpp"

namespace httplib {
class Server;
}

namespace copguide::gateway {

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  std::filesystem::path static_dir;
  std::filesystem::path out_dir = ".";
  AppConfig config;
  std::string participant = "P01";
  // Pace simulated sessions at wall-clock speed.
  bool realtime = true;
  std::size_t stream_queue = 1024;
};

/// Sample source fed by the UI's pointer ("mouse as CoP") mode.
class UiSource : public board::SampleSource {
 public:
  explicit UiSource(board::SensorSettings sensor, double body_mass_kg = 65.0);

  /// Positions are board coordinates in cm; the sample is synthesised as
  /// corner loads. Throws kOutOfOrderSample if ts goes backwards.
  void push(TimestampMs ts, Vec2 pos, bool valid);
  void close();

  std::optional<CoPSample> next() override;
  std::string_view kind() const override { return "ui"; }

 private:
  board::SensorSettings sensor_;
  double body_mass_kg_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<CoPSample> queue_;
  std::optional<TimestampMs> last_ts_;
  bool closed_ = false;
};

class SessionController {
 public:
  struct Reply {
    int status = 200;
    json body;
  };

  SessionController(ServeOptions opts, InProcessBus& bus);
  ~SessionController();
  SessionController(const SessionController&) = delete;
  SessionController& operator=(const SessionController&) = delete;

  /// Verbs:
  ///   start_session {modality?, source?: "simulated"|"ui", participant?, seed?}
  ///   abort
  ///   set_modality {modality}
  ///   submit_difficulty {modality, rating: 1..7, participant?}
  ///   cop_sample {x, y, valid?, ts?}   (ui-source sessions only)
  /// 400 for malformed requests, 409 when the verb does not fit the state.
  Reply handle(const json& request);

  json status() const;
  /// Blocks until the running session (if any) has finished.
  void wait_idle();

 private:
  Reply start_session(const json& req);
  Reply submit_difficulty(const json& req);
  Reply cop_sample(const json& req);
  void join_finished_locked();

  ServeOptions opts_;
  InProcessBus& bus_;
  mutable std::mutex mu_;
  Modality modality_;
  std::thread worker_;
  std::atomic<bool> running_{false};
  std::atomic<bool> abort_{false};
  std::shared_ptr<UiSource> ui_source_;
  std::string current_participant_;
  Modality current_modality_ = Modality::kHaptic;
  std::filesystem::path current_log_;
  TimestampMs ui_clock_origin_ms_ = 0;
  // (participant, modality) -> log of the last finished session
  std::map<std::pair<std::string, Modality>, std::filesystem::path> finished_;
  std::size_t sessions_started_ = 0;
  std::string last_error_;
};

class TelemetryServer {
 public:
  explicit TelemetryServer(ServeOptions opts);
  ~TelemetryServer();
  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  /// Binds the listening socket; returns the port. Throws kTransport.
  int bind();
  /// Serves until stop(). Call bind() first.
  void listen();
  void stop();

  InProcessBus& bus() { return bus_; }
  SessionController& controller() { return *controller_; }

 private:
  ServeOptions opts_;
  InProcessBus bus_;
  std::unique_ptr<SessionController> controller_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> stopping_{false};
};

}  // namespace copguide::gateway
