#include "copguide/sources.hpp"

#include <chrono>
#include "json.hpp"

#include "copguide/error.hpp"

namespace copguide::board {

using nlohmann::json;

ReplaySource::ReplaySource(const std::filesystem::path& path, SensorSettings settings)
    : in_(path), settings_(settings) {
  if (!in_) {
    throw Error(ErrorCode::kSourceUnavailable, "cannot open replay log " + path.string());
  }
}

std::optional<CoPSample> ReplaySource::next() {
  std::string line;
  while (std::getline(in_, line)) {
    if (line.empty()) continue;
    // A final line without newline may be a torn write.
    const bool torn = in_.eof();
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || torn) {
      ++malformed_;
      continue;
    }
    if (j.contains("type") && j["type"] != "sample") continue;
    try {
      const auto ts = (j.contains("ts") ? j["ts"] : j.at("ts_ms")).get<TimestampMs>();
      if (last_ts_ && ts < *last_ts_) {
        ++malformed_;
        continue;
      }
      LoadSample loads;
      loads.ts = ts;
      if (j.contains("kg")) {
        const auto& kg = j["kg"];
        if (!kg.is_array() || kg.size() != 4) {
          ++malformed_;
          continue;
        }
        for (std::size_t c = 0; c < 4; ++c) loads.loads[c] = kg[c].get<double>();
        ++calibrated_;
      } else if (j.contains("tr_kg")) {
        loads.loads = {j.at("tr_kg").get<double>(), j.at("br_kg").get<double>(),
                       j.at("tl_kg").get<double>(), j.at("bl_kg").get<double>()};
        ++calibrated_;
      } else if (j.contains("raw")) {
        loads = calibrate(parse_frame_hex(j["raw"].get<std::string>(), ts), settings_.calibration);
        ++raw_;
      } else {
        ++malformed_;
        continue;
      }
      last_ts_ = ts;
      return compute_cop(loads, settings_.geom, settings_.min_load_kg);
    } catch (const json::exception&) {
      ++malformed_;
    } catch (const Error&) {
      ++malformed_;
    }
  }
  return std::nullopt;
}

LiveSource::LiveSource(const std::filesystem::path& device, SensorSettings settings, Clock clock)
    : settings_(settings), clock_(std::move(clock)) {
  settings_.calibration.validate();
  if (device == "-") {
    file_ = stdin;
  } else {
    file_ = std::fopen(device.c_str(), "rb");
    owns_ = true;
  }
  if (file_ == nullptr) {
    throw Error(ErrorCode::kSourceUnavailable, "cannot open board device " + device.string());
  }
}

LiveSource::~LiveSource() {
  if (owns_ && file_ != nullptr) std::fclose(file_);
}

std::optional<CoPSample> LiveSource::next() {
  std::array<std::uint8_t, kFrameSize> buf{};
  const std::size_t got = std::fread(buf.data(), 1, buf.size(), file_);
  if (got == 0) return std::nullopt;
  if (got < buf.size()) {
    // Torn final frame: drop it and end the stream.
    ++truncated_;
    return std::nullopt;
  }
  const auto frame = parse_frame(buf, clock_());
  return compute_cop(calibrate(frame, settings_.calibration), settings_.geom,
                     settings_.min_load_kg);
}

LiveSource::Clock LiveSource::steady_clock() {
  const auto start = std::chrono::steady_clock::now();
  return [start] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
  };
}

LiveSource::Clock LiveSource::tick_clock(TimestampMs period_ms) {
  return [period_ms, k = TimestampMs{0}]() mutable { return period_ms * k++; };
}

}  // namespace copguide::board
