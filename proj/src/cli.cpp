#include "copguide/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "copguide/analysis.hpp"
#include "copguide/cohort.hpp"
#include "copguide/error.hpp"
#include "copguide/log.hpp"
#include "copguide/mqtt.hpp"
#include "copguide/serve.hpp"

namespace copguide::cli {

namespace fs = std::filesystem;
using gateway::AppConfig;
using gateway::json;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void install_signal_handlers() {
  g_interrupted = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

struct ConfigOpts {
  std::string file;
  std::vector<std::string> sets;
};

void add_config_opts(CLI::App* app, ConfigOpts& c) {
  app->add_option("--config", c.file, "key = value config file")->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "override one config key (key=value), repeatable");
}

AppConfig build_config(const ConfigOpts& c) {
  AppConfig cfg = c.file.empty() ? AppConfig{} : gateway::load_config_file(c.file);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "--set expects key=value, got '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::vector<Modality> parse_modalities(const std::string& s) {
  if (s == "all") return {kAllModalities.begin(), kAllModalities.end()};
  return {parse_modality(s)};
}

std::pair<std::string, std::uint16_t> parse_host_port(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidConfig, "expected host:port, got '" + s + "'");
  }
  int port = 0;
  try {
    port = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port <= 0 || port > 65535) throw Error(ErrorCode::kInvalidConfig, "bad port in '" + s + "'");
  return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::unique_ptr<gateway::mqtt::BusBridge> connect_mqtt(const std::string& target,
                                                       gateway::InProcessBus& bus) {
  if (target.empty()) return nullptr;
  const auto [host, port] = parse_host_port(target);
  auto client = std::make_unique<gateway::mqtt::Client>();
  client->connect(host, port, "copguide");
  return std::make_unique<gateway::mqtt::BusBridge>(bus, std::move(client));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kSourceUnavailable, "cannot write " + path.string());
  f << text;
}

void print_trials(std::ostream& out, const std::vector<guidance::TrialRecord>& records) {
  out << "trial target success duration_s duration_ex_dwell_s\n";
  for (const auto& r : records) {
    out << r.trial_no << ' ' << r.target.index << ' ' << (r.success ? "yes" : "no") << ' '
        << gateway::format_double(r.duration_s) << ' '
        << gateway::format_double(r.duration_ex_dwell_s) << '\n';
  }
}

// ---- run -------------------------------------------------------------------

struct RunOpts {
  ConfigOpts config;
  std::string device = "-";
  bool tick_clock = false;
  std::string participant = "P01";
  std::string modality;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mqtt;
};

int cmd_run(const RunOpts& o, std::ostream& out) {
  AppConfig cfg = build_config(o.config);
  if (!o.modality.empty()) cfg.session.modality = parse_modality(o.modality);
  if (o.seed) cfg.session.seed = *o.seed;
  const fs::path log_path =
      o.out.empty()
          ? fs::path(o.participant + "_" + std::string(to_string(cfg.session.modality)) + ".log")
          : fs::path(o.out);

  auto source = open_source(LiveSpec{o.device, o.tick_clock, cfg.session.tick_hz}, cfg.sensor);

  gateway::LogHeader header;
  header.participant = o.participant;
  header.modality = cfg.session.modality;
  header.seed = cfg.session.seed;
  header.source = "live";
  header.config = cfg;
  gateway::LogWriter writer(log_path, header);
  gateway::AsyncObserver async_writer(writer);
  gateway::InProcessBus bus;
  gateway::BusObserver bus_obs(bus);
  auto bridge = connect_mqtt(o.mqtt, bus);

  std::vector<SessionObserver*> observers{&async_writer};
  if (bridge) observers.push_back(&bus_obs);

  install_signal_handlers();
  LoopOptions lo;
  lo.abort = &g_interrupted;
  const auto outcome = run_session_loop(cfg.session, cfg.encoder, *source, observers, lo);
  if (bridge) bridge->stop();

  print_trials(out, outcome.records);
  out << "log: " << log_path.string() << '\n';
  if (!outcome.finished) {
    throw Error(ErrorCode::kSourceUnavailable,
                std::string(outcome.aborted ? "interrupted" : "board stream ended") + " after " +
                    std::to_string(outcome.records.size()) + " of " +
                    std::to_string(cfg.session.trial_count()) + " trials");
  }
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateOpts {
  ConfigOpts config;
  int participants = 6;
  int seeds = 1;
  std::uint64_t seed = 1;
  std::string modality = "all";
  std::string out;
  bool pooled = false;
  double alpha = 0.05;
};

std::vector<fs::path> write_cohort_logs(const sim::CohortSpec& spec, const AppConfig& base,
                                        const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> paths;
  for (const auto& plan : sim::plan_cohort(spec)) {
    gateway::LogHeader header;
    header.participant = gateway::participant_id(plan.participant);
    header.modality = plan.modality;
    header.seed = plan.session.seed;
    header.source = "simulated";
    header.config = base;
    header.config.session = plan.session;
    header.config.model = plan.model;
    const auto path =
        dir / (header.participant + "_" + std::string(to_string(plan.modality)) + ".log");
    gateway::LogWriter writer(path, header);
    SessionObserver* observers[] = {&writer};
    sim::run_session(plan.model, plan.session, spec.encoder, false, spec.sensor, observers);
    paths.push_back(path);
  }
  return paths;
}

void print_descriptive(std::ostream& out, const gateway::AnalysisInput& input,
                       const std::vector<Modality>& modalities) {
  for (const auto m : modalities) {
    std::vector<double> d;
    for (const auto& r : input.trials) {
      if (r.modality == m && r.success) d.push_back(r.duration_s);
    }
    if (d.size() < 2) {
      out << to_string(m) << ": " << d.size() << " successful trials\n";
      continue;
    }
    const auto s = stats::summarize(d, m);
    out << to_string(m) << ": n=" << s.n << " mean=" << s.mean_s << " s std=" << s.std_s << " s\n";
  }
}

std::string short_p(const stats::PairwiseTest& t) {
  std::ostringstream os;
  os << to_string(t.pair.first).substr(0, 1) << to_string(t.pair.second).substr(0, 1)
     << " p_adj=" << t.p_adj << (t.significant ? " sig" : " n.s.");
  return os.str();
}

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  const AppConfig cfg = build_config(o.config);
  sim::CohortSpec spec;
  spec.participants = o.participants;
  spec.modalities = parse_modalities(o.modality);
  spec.session = cfg.session;
  spec.encoder = cfg.encoder;
  spec.model = cfg.model;
  spec.sensor = cfg.sensor;
  spec.keep_paths = false;
  const bool compare = spec.modalities.size() == kAllModalities.size();
  const auto unit = o.pooled ? gateway::Unit::kPooledTrials : gateway::Unit::kParticipantMeans;

  int reproduced = 0;
  for (int k = 0; k < o.seeds; ++k) {
    spec.seed = o.seed + static_cast<std::uint64_t>(k);
    fs::path dir;
    if (!o.out.empty()) {
      dir = o.seeds == 1 ? fs::path(o.out) : fs::path(o.out) / ("seed" + std::to_string(spec.seed));
    }
    const auto input = dir.empty() ? gateway::rows_from_runs(sim::simulate_cohort(spec))
                                   : gateway::rows_from_logs(write_cohort_logs(spec, cfg, dir));
    if (!compare) {
      if (o.seeds > 1) out << "seed " << spec.seed << '\n';
      print_descriptive(out, input, spec.modalities);
      continue;
    }
    const auto report = gateway::analyze(input, unit, o.alpha);
    const bool pattern = gateway::audio_gap_pattern(report);
    reproduced += pattern ? 1 : 0;
    if (!dir.empty()) {
      write_text(dir / "report.json", gateway::report_to_json(report).dump(2) + "\n");
      write_text(dir / "report.txt", gateway::report_to_text(report));
    }
    if (o.seeds == 1) {
      out << gateway::report_to_text(report);
    } else {
      out << "seed " << spec.seed;
      for (const auto& t : report.tests) out << "  " << short_p(t);
      out << (pattern ? "  pattern" : "  -") << '\n';
    }
  }
  if (compare && o.seeds > 1) {
    out << "audio-gap pattern in " << reproduced << " of " << o.seeds << " seeds\n";
  }
  return kExitOk;
}

// ---- replay ----------------------------------------------------------------

struct ReplayOpts {
  std::string log;
  std::string out;
  bool check = false;
};

int cmd_replay(const ReplayOpts& o, std::ostream& out) {
  const auto original = gateway::read_log(o.log);
  const AppConfig& cfg = original.header.config;
  board::ReplaySource source(o.log, cfg.sensor);

  std::optional<gateway::LogWriter> writer;
  std::vector<SessionObserver*> observers;
  if (!o.out.empty()) {
    // The samples are the original source's, so the header keeps its kind.
    writer.emplace(o.out, original.header);
    observers.push_back(&*writer);
  }
  LoopOptions lo;
  lo.keep_paths = false;
  const auto outcome = run_session_loop(cfg.session, cfg.encoder, source, observers, lo);
  print_trials(out, outcome.records);

  bool same = outcome.records.size() == original.trials.size();
  for (std::size_t i = 0; same && i < outcome.records.size(); ++i) {
    const auto& a = outcome.records[i];
    const auto& b = original.trials[i];
    same = a.trial_no == b.trial_no && a.target.index == b.target.index && a.success == b.success &&
           a.duration_s == b.duration_s && a.duration_ex_dwell_s == b.duration_ex_dwell_s;
  }
  out << "samples " << outcome.samples << ", malformed lines " << source.malformed_lines()
      << ", trials " << outcome.records.size() << " (logged " << original.trials.size() << ")\n";
  out << "matches log: " << (same ? "yes" : "no") << '\n';
  if (o.check && !same) {
    throw Error(ErrorCode::kSchemaViolation, "replayed trials differ from the log");
  }
  return kExitOk;
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeOpts {
  std::vector<std::string> inputs;
  bool pooled = false;
  double alpha = 0.05;
  std::string json_out;
  std::string text_out;
};

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> logs;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".log") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      logs.insert(logs.end(), found.begin(), found.end());
    } else {
      logs.emplace_back(in);
    }
  }
  return logs;
}

int cmd_analyze(const AnalyzeOpts& o, std::ostream& out) {
  const auto input = gateway::rows_from_logs(expand_inputs(o.inputs));
  const auto report = gateway::analyze(
      input, o.pooled ? gateway::Unit::kPooledTrials : gateway::Unit::kParticipantMeans, o.alpha);
  const auto text = gateway::report_to_text(report);
  if (!o.json_out.empty()) write_text(o.json_out, gateway::report_to_json(report).dump(2) + "\n");
  if (!o.text_out.empty()) write_text(o.text_out, text);
  out << text;
  return kExitOk;
}

// ---- serve -----------------------------------------------------------------

struct ServeOpts {
  ConfigOpts config;
  std::string host = "127.0.0.1";
  int port = 8765;
  std::string static_dir;
  std::string out = ".";
  std::string participant = "P01";
  bool no_realtime = false;
  std::string mqtt;
};

int cmd_serve(const ServeOpts& o, std::ostream& out) {
  gateway::ServeOptions so;
  so.config = build_config(o.config);
  so.host = o.host;
  so.port = o.port;
  so.static_dir = o.static_dir;
  so.out_dir = o.out;
  so.participant = o.participant;
  so.realtime = !o.no_realtime;

  gateway::TelemetryServer server(so);
  auto bridge = connect_mqtt(o.mqtt, server.bus());
  const int port = server.bind();
  out << "listening on http://" << o.host << ':' << port << std::endl;

  install_signal_handlers();
  std::thread watcher([&] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  server.listen();
  g_interrupted = true;
  watcher.join();
  if (bridge) bridge->stop();
  return kExitOk;
}

// ---- targets ---------------------------------------------------------------

struct TargetsOpts {
  ConfigOpts config;
  std::uint64_t seed = 0;
  bool json = false;
};

int cmd_targets(const TargetsOpts& o, std::ostream& out) {
  AppConfig cfg = build_config(o.config);
  cfg.session.seed = o.seed;
  const auto targets = guidance::make_targets(cfg.session);
  const auto schedule = guidance::make_schedule(cfg.session);
  if (o.json) {
    json j{{"seed", o.seed}, {"targets", json::array()}, {"schedule", schedule}};
    for (const auto& t : targets) {
      j["targets"].push_back({{"index", t.index}, {"x", t.x}, {"y", t.y}});
    }
    out << j.dump() << '\n';
    return kExitOk;
  }
  out << "seed " << o.seed << '\n';
  for (const auto& t : targets) {
    out << "target " << t.index << ' ' << gateway::format_double(t.x) << ' '
        << gateway::format_double(t.y) << '\n';
  }
  out << "schedule";
  for (const int s : schedule) out << ' ' << s;
  out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-loop centre-of-pressure guidance: sessions, simulation and analysis",
               "copguide"};
  app.footer("schema " + std::string(kCliSchema) + "; logs " + std::string(gateway::kLogSchema) +
             "; reports copguide-report/1");
  app.require_subcommand(1);

  RunOpts run_o;
  auto* run_cmd = app.add_subcommand("run", "live board session");
  add_config_opts(run_cmd, run_o.config);
  run_cmd->add_option("--device", run_o.device, "frame stream (device, file, or - for stdin)");
  run_cmd->add_flag("--tick-clock", run_o.tick_clock,
                    "stamp frames at the tick rate instead of wall time");
  run_cmd->add_option("--participant", run_o.participant);
  run_cmd->add_option("--modality", run_o.modality, "haptic|visual|audio (h|v|a)");
  run_cmd->add_option("--seed", run_o.seed, "target schedule seed");
  run_cmd->add_option("--out", run_o.out, "session log path");
  run_cmd->add_option("--mqtt", run_o.mqtt, "also publish to an MQTT broker host:port");

  SimulateOpts sim_o;
  auto* sim_cmd = app.add_subcommand("simulate", "simulated cohort runs");
  add_config_opts(sim_cmd, sim_o.config);
  sim_cmd->add_option("--participants", sim_o.participants)->check(CLI::Range(1, 10000));
  sim_cmd->add_option("--seeds", sim_o.seeds, "number of repetitions (seed, seed+1, ...)")
      ->check(CLI::Range(1, 1000000));
  sim_cmd->add_option("--seed", sim_o.seed, "base seed");
  sim_cmd->add_option("--modality", sim_o.modality, "all|h|v|a")
      ->check(CLI::IsMember({"all", "h", "v", "a", "haptic", "visual", "audio"}));
  sim_cmd->add_option("--out", sim_o.out, "write session logs and reports here");
  sim_cmd->add_flag("--pooled", sim_o.pooled, "pair pooled trials instead of participant means");
  sim_cmd->add_option("--alpha", sim_o.alpha)->check(CLI::Range(0.0, 1.0));

  ReplayOpts replay_o;
  auto* replay_cmd = app.add_subcommand("replay", "re-run guidance over a session log");
  replay_cmd->add_option("log", replay_o.log)->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_o.out, "write the replayed session log");
  replay_cmd->add_flag("--check", replay_o.check, "exit 1 unless trials match the log exactly");

  AnalyzeOpts analyze_o;
  auto* analyze_cmd = app.add_subcommand("analyze", "statistics over session logs");
  analyze_cmd->add_option("logs", analyze_o.inputs, "log files or directories")
      ->required()
      ->expected(1, -1);
  analyze_cmd->add_flag("--pooled", analyze_o.pooled,
                        "pair pooled trials instead of participant means");
  analyze_cmd->add_option("--alpha", analyze_o.alpha)->check(CLI::Range(0.0, 1.0));
  analyze_cmd->add_option("--json", analyze_o.json_out, "write the report as JSON");
  analyze_cmd->add_option("--text", analyze_o.text_out, "write the text table");

  ServeOpts serve_o;
  auto* serve_cmd = app.add_subcommand("serve", "telemetry stream and UI control backend");
  add_config_opts(serve_cmd, serve_o.config);
  serve_cmd->add_option("--host", serve_o.host);
  serve_cmd->add_option("--port", serve_o.port, "0 picks a free port")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--static", serve_o.static_dir, "UI assets")->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--out", serve_o.out, "session log directory");
  serve_cmd->add_option("--participant", serve_o.participant);
  serve_cmd->add_flag("--no-realtime", serve_o.no_realtime,
                      "run simulated sessions as fast as possible");
  serve_cmd->add_option("--mqtt", serve_o.mqtt, "also publish to an MQTT broker host:port");

  TargetsOpts targets_o;
  auto* targets_cmd = app.add_subcommand("targets", "print targets and the schedule for a seed");
  add_config_opts(targets_cmd, targets_o.config);
  targets_cmd->add_option("--seed", targets_o.seed)->required();
  targets_cmd->add_flag("--json", targets_o.json);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_o, out);
    if (*sim_cmd) return cmd_simulate(sim_o, out);
    if (*replay_cmd) return cmd_replay(replay_o, out);
    if (*analyze_cmd) return cmd_analyze(analyze_o, out);
    if (*serve_cmd) return cmd_serve(serve_o, out);
    if (*targets_cmd) return cmd_targets(targets_o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace copguide::cli
