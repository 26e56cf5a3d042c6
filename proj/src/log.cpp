#include "copguide/log.hpp"

#include <sstream>

#include "copguide/error.hpp"

namespace copguide::gateway {

json header_to_json(const LogHeader& h) {
  json cfg = json::object();
  for (const auto& [k, v] : h.config.to_map()) cfg[k] = v;
  return {{"type", "header"},
          {"schema", kLogSchema},
          {"participant", h.participant},
          {"modality", std::string(to_string(h.modality))},
          {"seed", h.seed},
          {"source", h.source},
          {"config", cfg}};
}

LogHeader header_from_json(const json& j) {
  if (!j.is_object() || j.value("type", "") != "header") {
    throw Error(ErrorCode::kMalformedLogLine, "first line is not a log header");
  }
  if (j.value("schema", "") != kLogSchema) {
    throw Error(ErrorCode::kMalformedLogLine,
                "unsupported log schema '" + j.value("schema", "") + "'");
  }
  LogHeader h;
  try {
    h.participant = j.at("participant").get<std::string>();
    h.modality = parse_modality(j.at("modality").get<std::string>());
    h.seed = j.at("seed").get<std::uint64_t>();
    h.source = j.at("source").get<std::string>();
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : j.at("config").items()) kv[k] = v.get<std::string>();
    h.config = AppConfig::from_map(kv);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedLogLine, std::string("bad log header: ") + e.what());
  }
  return h;
}

LogWriter::LogWriter(const std::filesystem::path& path, const LogHeader& header,
                     std::size_t flush_every)
    : path_(path),
      out_(path, std::ios::trunc),
      flush_every_(std::max<std::size_t>(1, flush_every)) {
  if (!out_) throw Error(ErrorCode::kSourceUnavailable, "cannot write log " + path.string());
  write(header_to_json(header));
  out_.flush();
}

void LogWriter::write(const json& j) {
  // A crash can leave a torn last line; readers drop a final line that lacks
  // its newline.
  out_ << (j.dump() + '\n');
  if (++pending_ >= flush_every_) {
    out_.flush();
    pending_ = 0;
  }
}

void LogWriter::on_sample(const CoPSample& s) {
  json j = to_json(s);
  j["type"] = "sample";
  last_ts_ = std::max(last_ts_, s.ts);
  write(j);
}

void LogWriter::on_command(TimestampMs ts, const feedback::FeedbackCommand& cmd) {
  json j = to_json(cmd);
  j["type"] = "command";
  j["ts"] = ts;
  write(j);
}

void LogWriter::on_event(const guidance::GuidanceEvent& e) {
  json j = to_json(e);
  j["type"] = "event";
  write(j);
}

void LogWriter::on_trial(const guidance::TrialRecord& r) {
  json j = to_json(r);
  j["type"] = "trial";
  j["ts"] = r.success_ts;
  ++trials_;
  write(j);
}

void LogWriter::on_finish() {
  write({{"type", "end"}, {"ts", last_ts_}, {"trials", trials_}});
  out_.flush();
}

void append_difficulty(const std::filesystem::path& log, const DifficultyEntry& entry,
                       TimestampMs ts) {
  if (entry.rating < 1 || entry.rating > 7) {
    throw Error(ErrorCode::kSchemaViolation, "difficulty rating must be in 1..7");
  }
  std::ofstream out(log, std::ios::app);
  if (!out) throw Error(ErrorCode::kSourceUnavailable, "cannot append to " + log.string());
  const json j = {{"type", "difficulty"},
                  {"ts", ts},
                  {"participant", entry.participant},
                  {"modality", std::string(to_string(entry.modality))},
                  {"rating", entry.rating}};
  out << (j.dump() + '\n');
}

ParsedLog read_log(const std::filesystem::path& path, bool with_samples) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kSourceUnavailable, "cannot open log " + path.string());
  ParsedLog log;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const bool torn = in.eof();
    if (line.empty()) continue;
    if (torn) {
      log.torn_tail = true;
      break;
    }
    const json j = json::parse(line, nullptr, false);
    if (!have_header) {
      if (j.is_discarded()) throw Error(ErrorCode::kMalformedLogLine, "unreadable log header");
      log.header = header_from_json(j);
      have_header = true;
      continue;
    }
    if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
      ++log.malformed;
      continue;
    }
    try {
      const auto type = j["type"].get<std::string>();
      if (type == "sample") {
        if (with_samples) log.samples.push_back(sample_from_json(j));
      } else if (type == "event") {
        log.events.push_back(event_from_json(j));
      } else if (type == "trial") {
        log.trials.push_back(trial_from_json(j));
      } else if (type == "difficulty") {
        DifficultyEntry d;
        d.participant = j.at("participant").get<std::string>();
        d.modality = parse_modality(j.at("modality").get<std::string>());
        d.rating = j.at("rating").get<int>();
        if (d.rating < 1 || d.rating > 7) {
          ++log.malformed;
          continue;
        }
        log.difficulty.push_back(d);
      } else if (type == "end") {
        log.complete = true;
      } else if (type != "command") {
        ++log.malformed;
      }
    } catch (const json::exception&) {
      ++log.malformed;
    } catch (const Error&) {
      ++log.malformed;
    }
  }
  if (!have_header)
    throw Error(ErrorCode::kMalformedLogLine, "log has no header: " + path.string());
  return log;
}

}  // namespace copguide::gateway
