#include <fstream>

#include "copguide/error.hpp"
#include "copguide/log.hpp"
#include "copguide/participant_sim.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace copguide;
using namespace copguide::gateway;
using copguide::testing::read_lines;
using copguide::testing::TempDir;

namespace {

LogHeader sim_header(Modality m, std::uint64_t seed) {
  LogHeader h;
  h.participant = "P03";
  h.modality = m;
  h.seed = seed;
  h.source = "simulated";
  h.config.session.modality = m;
  h.config.session.seed = seed;
  return h;
}

std::vector<guidance::TrialRecord> write_sim_log(const std::filesystem::path& path,
                                                 const LogHeader& h) {
  LogWriter writer(path, h, 64);
  SessionObserver* obs[] = {&writer};
  auto model = h.config.model;
  model.seed = h.seed + 1;
  return sim::run_session(model, h.config.session, h.config.encoder, false, h.config.sensor, obs);
}

void write_prefix(const std::filesystem::path& out, const std::vector<std::string>& lines,
                  std::size_t n, const std::string& partial = "") {
  std::ofstream f(out, std::ios::trunc);
  for (std::size_t i = 0; i < n; ++i) f << lines[i] << '\n';
  f << partial;
}

}  // namespace

TEST_CASE("header round-trips") {
  auto h = sim_header(Modality::kAudio, 42);
  h.config.set("dwell_s", "2.5");
  const auto back = header_from_json(header_to_json(h));
  CHECK(back.participant == "P03");
  CHECK(back.modality == Modality::kAudio);
  CHECK(back.seed == 42);
  CHECK(back.source == "simulated");
  CHECK(back.config.to_map() == h.config.to_map());

  auto j = header_to_json(h);
  j["schema"] = "copguide-log/0";
  CHECK_THROWS_AS(header_from_json(j), Error);
}

TEST_CASE("a simulated session log holds every trial and reads back exactly") {
  TempDir dir;
  const auto path = dir / "s.log";
  const auto recs = write_sim_log(path, sim_header(Modality::kVisual, 5));
  REQUIRE(recs.size() == 24);

  const auto lines = read_lines(path);
  CHECK(json::parse(lines.front())["schema"] == "copguide-log/1");
  CHECK(json::parse(lines.back())["type"] == "end");

  const auto log = read_log(path, true);
  CHECK(log.complete);
  CHECK_FALSE(log.torn_tail);
  CHECK(log.malformed == 0);
  REQUIRE(log.trials.size() == 24);
  std::size_t completes = 0;
  for (const auto& e : log.events) completes += e.kind == guidance::EventKind::kTrialComplete;
  CHECK(completes == 24);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(log.trials[i].duration_s == recs[i].duration_s);
    CHECK(log.trials[i].duration_ex_dwell_s == recs[i].duration_ex_dwell_s);
    CHECK(log.trials[i].target == recs[i].target);
  }
  // Timestamps never decrease.
  for (std::size_t i = 1; i < log.samples.size(); ++i) {
    CHECK(log.samples[i].ts >= log.samples[i - 1].ts);
  }
}

TEST_CASE("every line-boundary prefix of a log parses") {
  TempDir dir;
  const auto path = dir / "s.log";
  auto h = sim_header(Modality::kHaptic, 9);
  h.config.session.reps_per_target = 1;
  write_sim_log(path, h);
  const auto lines = read_lines(path);
  REQUIRE(lines.size() > 100);

  const auto cut = dir / "cut.log";
  std::size_t last_trials = 0;
  for (std::size_t n = 1; n <= lines.size(); n += (n < 50 || n + 50 > lines.size()) ? 1 : 37) {
    write_prefix(cut, lines, n);
    const auto log = read_log(cut);
    CHECK(log.malformed == 0);
    CHECK_FALSE(log.torn_tail);
    CHECK(log.complete == (n == lines.size()));
    CHECK(log.trials.size() >= last_trials);
    last_trials = log.trials.size();

    // A torn final line is dropped, not counted as malformed.
    if (n < lines.size()) {
      write_prefix(cut, lines, n, lines[n].substr(0, lines[n].size() / 2));
      const auto torn = read_log(cut);
      CHECK(torn.torn_tail);
      CHECK(torn.malformed == 0);
      CHECK(torn.trials.size() == log.trials.size());
    }
  }
  CHECK(last_trials == 8);

  write_prefix(cut, lines, 0);
  CHECK_THROWS_AS(read_log(cut), Error);
}

TEST_CASE("garbage body lines are counted and skipped") {
  TempDir dir;
  const auto path = dir / "s.log";
  auto h = sim_header(Modality::kHaptic, 2);
  h.config.session.reps_per_target = 1;
  write_sim_log(path, h);
  auto lines = read_lines(path);
  lines.insert(lines.begin() + 3, "{not json");
  lines.insert(lines.begin() + 5, R"({"type":"trial","trial":1})");
  lines.insert(lines.begin() + 7, R"({"type":"mystery"})");
  write_prefix(path, lines, lines.size());
  const auto log = read_log(path);
  CHECK(log.malformed == 3);
  CHECK(log.trials.size() == 8);
}

TEST_CASE("difficulty ratings append to the footer and are range checked") {
  TempDir dir;
  const auto path = dir / "s.log";
  auto h = sim_header(Modality::kHaptic, 2);
  h.config.session.reps_per_target = 1;
  write_sim_log(path, h);
  append_difficulty(path, {"P03", Modality::kHaptic, 1}, 10);
  append_difficulty(path, {"P03", Modality::kHaptic, 7}, 11);
  for (int bad : {0, 8, -3}) {
    CHECK_THROWS_AS(append_difficulty(path, {"P03", Modality::kHaptic, bad}, 12), Error);
  }
  const auto log = read_log(path);
  REQUIRE(log.difficulty.size() == 2);
  CHECK(log.difficulty[0].rating == 1);
  CHECK(log.difficulty[1].rating == 7);
  CHECK(log.malformed == 0);

  // A hand-edited out-of-range rating is not trusted.
  std::ofstream(path, std::ios::app)
      << R"({"type":"difficulty","ts":1,"participant":"P03","modality":"haptic","rating":9})"
      << '\n';
  CHECK(read_log(path).difficulty.size() == 2);
}
