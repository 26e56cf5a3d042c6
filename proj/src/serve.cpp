#include "copguide/serve.hpp"

#include <chrono>

#include "copguide/error.hpp"
#include "copguide/participant_sim.hpp"
#include "httplib.h"

namespace copguide::gateway {

namespace {

TimestampMs steady_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

SessionController::Reply bad_request(std::string msg) {
  return {400, json{{"ok", false}, {"error", std::move(msg)}}};
}

SessionController::Reply conflict(std::string msg) {
  return {409, json{{"ok", false}, {"error", std::move(msg)}}};
}

std::optional<Modality> modality_field(const json& req, std::string_view key) {
  auto it = req.find(key);
  if (it == req.end()) return std::nullopt;
  if (!it->is_string()) throw Error(ErrorCode::kSchemaViolation, "modality must be a string");
  return parse_modality(it->get<std::string>());
}

std::string participant_field(const json& req, const std::string& fallback) {
  auto it = req.find("participant");
  if (it == req.end()) return fallback;
  if (!it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorCode::kSchemaViolation, "participant must be a non-empty string");
  }
  return it->get<std::string>();
}

}  // namespace

UiSource::UiSource(board::SensorSettings sensor, double body_mass_kg)
    : sensor_(std::move(sensor)), body_mass_kg_(body_mass_kg) {}

void UiSource::push(TimestampMs ts, Vec2 pos, bool valid) {
  board::LoadSample load;
  load.ts = ts;
  load.loads = board::loads_for_cop(pos, valid ? body_mass_kg_ : 0.0, sensor_.geom);
  const CoPSample s = board::compute_cop(load, sensor_.geom, sensor_.min_load_kg);
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (last_ts_ && ts < *last_ts_) {
      throw Error(ErrorCode::kOutOfOrderSample, "ui sample timestamp went backwards");
    }
    last_ts_ = ts;
    queue_.push_back(s);
  }
  cv_.notify_one();
}

void UiSource::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::optional<CoPSample> UiSource::next() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
  if (queue_.empty()) return std::nullopt;
  CoPSample s = queue_.front();
  queue_.pop_front();
  return s;
}

SessionController::SessionController(ServeOptions opts, InProcessBus& bus)
    : opts_(std::move(opts)), bus_(bus), modality_(opts_.config.session.modality) {
  opts_.config.validate();
}

SessionController::~SessionController() {
  abort_ = true;
  std::unique_lock lock(mu_);
  if (ui_source_) ui_source_->close();
  if (worker_.joinable()) {
    lock.unlock();
    worker_.join();
  }
}

void SessionController::join_finished_locked() {
  if (!running_ && worker_.joinable()) worker_.join();
}

void SessionController::wait_idle() {
  std::thread t;
  {
    std::lock_guard lock(mu_);
    t = std::move(worker_);
  }
  if (t.joinable()) t.join();
}

SessionController::Reply SessionController::handle(const json& request) {
  if (!request.is_object() || !request.contains("verb") || !request["verb"].is_string()) {
    return bad_request("request must be an object with a string 'verb'");
  }
  const std::string verb = request["verb"].get<std::string>();
  try {
    if (verb == "start_session") return start_session(request);
    if (verb == "abort") {
      std::lock_guard lock(mu_);
      if (!running_) return conflict("no session running");
      abort_ = true;
      if (ui_source_) ui_source_->close();
      return {200, json{{"ok", true}}};
    }
    if (verb == "set_modality") {
      auto m = modality_field(request, "modality");
      if (!m) return bad_request("missing modality");
      std::lock_guard lock(mu_);
      if (running_) return conflict("cannot change modality while a session runs");
      modality_ = *m;
      return {200, json{{"ok", true}, {"modality", to_string(*m)}}};
    }
    if (verb == "submit_difficulty") return submit_difficulty(request);
    if (verb == "cop_sample") return cop_sample(request);
  } catch (const Error& e) {
    return bad_request(e.what());
  }
  return bad_request("unknown verb '" + verb + "'");
}

SessionController::Reply SessionController::start_session(const json& req) {
  std::unique_lock lock(mu_);
  if (running_) return conflict("a session is already running");
  join_finished_locked();

  AppConfig cfg = opts_.config;
  if (auto m = modality_field(req, "modality")) modality_ = *m;
  cfg.session.modality = modality_;
  if (auto it = req.find("seed"); it != req.end()) {
    if (!it->is_number_unsigned()) return bad_request("seed must be a non-negative integer");
    cfg.session.seed = it->get<std::uint64_t>();
  }
  const std::string participant = participant_field(req, opts_.participant);
  const std::string source_kind = req.value("source", std::string("simulated"));
  if (source_kind != "simulated" && source_kind != "ui") {
    return bad_request("source must be 'simulated' or 'ui'");
  }

  std::unique_ptr<board::SampleSource> source;
  std::shared_ptr<UiSource> ui;
  if (source_kind == "ui") {
    ui = std::make_shared<UiSource>(cfg.sensor, cfg.model.body_mass_kg);
  } else {
    sim::SimOptions so;
    so.tick_hz = cfg.session.tick_hz;
    so.visual_scale_cm = cfg.encoder.visual_scale_cm;
    source = open_source(SimulatedSpec{cfg.model, cfg.session.modality, so}, cfg.sensor);
  }

  std::filesystem::create_directories(opts_.out_dir);
  LogHeader header;
  header.participant = participant;
  header.modality = cfg.session.modality;
  header.seed = cfg.session.seed;
  header.source = source_kind;
  header.config = cfg;
  const auto log_path = opts_.out_dir / (participant + "_" + std::string(to_string(modality_)) +
                                         "_s" + std::to_string(++sessions_started_) + ".log");

  abort_ = false;
  running_ = true;
  ui_source_ = ui;
  current_participant_ = participant;
  current_modality_ = cfg.session.modality;
  current_log_ = log_path;
  ui_clock_origin_ms_ = steady_ms();

  const bool realtime = opts_.realtime && source_kind == "simulated";
  worker_ = std::thread(
      [this, cfg, header, log_path, ui, source = std::move(source), realtime]() mutable {
        SessionOutcome outcome;
        std::string error;
        try {
          LogWriter writer(log_path, header);
          AsyncObserver async_writer(writer);
          BusObserver bus_obs(bus_);
          SessionObserver* observers[] = {&async_writer, &bus_obs};
          LoopOptions lo;
          lo.abort = &abort_;
          lo.realtime = realtime;
          board::SampleSource& src = ui ? static_cast<board::SampleSource&>(*ui) : *source;
          outcome = run_session_loop(cfg.session, cfg.encoder, src, observers, lo);
        } catch (const std::exception& e) {
          outcome.finished = false;
          error = e.what();
        }
        std::lock_guard lock(mu_);
        last_error_ = error;
        if (outcome.finished) {
          finished_[{header.participant, header.modality}] = log_path;
        }
        ui_source_.reset();
        running_ = false;
      });

  return {200, json{{"ok", true},
                    {"participant", participant},
                    {"modality", to_string(cfg.session.modality)},
                    {"source", source_kind},
                    {"seed", cfg.session.seed},
                    {"log", log_path.string()}}};
}

SessionController::Reply SessionController::submit_difficulty(const json& req) {
  auto m = modality_field(req, "modality");
  if (!m) return bad_request("missing modality");
  auto it = req.find("rating");
  if (it == req.end() || !it->is_number_integer()) {
    return bad_request("rating must be an integer 1..7");
  }
  const auto rating = it->get<std::int64_t>();
  if (rating < 1 || rating > 7) return bad_request("rating must be an integer 1..7");

  std::lock_guard lock(mu_);
  const std::string participant = participant_field(req, opts_.participant);
  auto f = finished_.find({participant, *m});
  if (f == finished_.end()) {
    return conflict("no finished " + std::string(to_string(*m)) + " session for " + participant);
  }
  append_difficulty(f->second, DifficultyEntry{participant, *m, static_cast<int>(rating)},
                    steady_ms());
  return {200, json{{"ok", true}, {"log", f->second.string()}}};
}

SessionController::Reply SessionController::cop_sample(const json& req) {
  std::shared_ptr<UiSource> ui;
  TimestampMs origin = 0;
  {
    std::lock_guard lock(mu_);
    ui = ui_source_;
    origin = ui_clock_origin_ms_;
  }
  if (!ui) return conflict("no ui-source session running");
  const auto x = req.find("x");
  const auto y = req.find("y");
  if (x == req.end() || y == req.end() || !x->is_number() || !y->is_number()) {
    return bad_request("cop_sample needs numeric x and y");
  }
  bool valid = true;
  if (auto v = req.find("valid"); v != req.end()) {
    if (!v->is_boolean()) return bad_request("valid must be a boolean");
    valid = v->get<bool>();
  }
  TimestampMs ts = steady_ms() - origin;
  if (auto t = req.find("ts"); t != req.end()) {
    if (!t->is_number_integer()) return bad_request("ts must be an integer (ms)");
    ts = t->get<TimestampMs>();
  }
  try {
    ui->push(ts, Vec2{x->get<double>(), y->get<double>()}, valid);
  } catch (const Error& e) {
    return conflict(e.what());
  }
  return {200, json{{"ok", true}, {"ts", ts}}};
}

json SessionController::status() const {
  std::lock_guard lock(mu_);
  json finished = json::array();
  for (const auto& [key, path] : finished_) {
    finished.push_back(
        {{"participant", key.first}, {"modality", to_string(key.second)}, {"log", path.string()}});
  }
  json j{{"running", running_.load()},
         {"modality", to_string(modality_)},
         {"finished", std::move(finished)},
         {"published", bus_.published()},
         {"dropped", bus_.dropped_total()}};
  if (!last_error_.empty()) j["last_error"] = last_error_;
  if (running_) {
    j["session"] = {{"participant", current_participant_},
                    {"modality", to_string(current_modality_)},
                    {"source", ui_source_ ? "ui" : "simulated"},
                    {"log", current_log_.string()}};
  }
  return j;
}

TelemetryServer::TelemetryServer(ServeOptions opts)
    : opts_(std::move(opts)),
      controller_(std::make_unique<SessionController>(opts_, bus_)),
      server_(std::make_unique<httplib::Server>()) {
  auto& srv = *server_;

  srv.Get("/stream", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = bus_.subscribe(opts_.stream_queue);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, sub](std::size_t, httplib::DataSink& sink) {
          if (stopping_) {
            sink.done();
            return true;
          }
          auto msg = sub->pop(std::chrono::milliseconds(250));
          std::string chunk = msg ? "data: " + to_wire(*msg).dump() + "\n\n" : ":\n\n";
          return sink.write(chunk.data(), chunk.size());
        },
        [this, sub](bool) { bus_.unsubscribe(sub); });
  });

  srv.Post("/control", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = json::parse(req.body, nullptr, false);
    SessionController::Reply reply;
    if (body.is_discarded()) {
      reply = {400, json{{"ok", false}, {"error", "body is not JSON"}}};
    } else {
      reply = controller_->handle(body);
    }
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  });

  srv.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(controller_->status().dump(), "application/json");
  });

  if (!opts_.static_dir.empty()) {
    if (!srv.set_mount_point("/", opts_.static_dir.string())) {
      throw Error(ErrorCode::kInvalidConfig,
                  "static directory not found: " + opts_.static_dir.string());
    }
  }
}

TelemetryServer::~TelemetryServer() { stop(); }

int TelemetryServer::bind() {
  int port = -1;
  if (opts_.port == 0) {
    port = server_->bind_to_any_port(opts_.host);
  } else if (server_->bind_to_port(opts_.host, opts_.port)) {
    port = opts_.port;
  }
  if (port < 0) {
    throw Error(ErrorCode::kTransport,
                "cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
  }
  return port;
}

void TelemetryServer::listen() { server_->listen_after_bind(); }

void TelemetryServer::stop() {
  stopping_ = true;
  if (server_) server_->stop();
}

}  // namespace copguide::gateway
