#include <fstream>

#include "copguide/error.hpp"
#include "copguide/session.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace copguide;
using namespace copguide::board;
using copguide::testing::TempDir;

namespace {

std::vector<CoPSample> drain(SampleSource& src) {
  std::vector<CoPSample> out;
  while (auto s = src.next()) out.push_back(*s);
  return out;
}

}  // namespace

TEST_CASE("replay of a ten-sample log yields ten samples in order, twice identically") {
  TempDir dir;
  const auto path = dir / "r.log";
  {
    std::ofstream f(path);
    for (int i = 0; i < 10; ++i) {
      f << R"({"ts":)" << i * 10 << R"(,"kg":[)" << 10 + i << ",15,15," << 20 - i << "]}\n";
    }
  }
  ReplaySource a(path, {});
  const auto sa = drain(a);
  REQUIRE(sa.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(sa[i].ts == i * 10);
  ReplaySource b(path, {});
  CHECK(drain(b) == sa);
  CHECK(a.malformed_lines() == 0);
  CHECK(a.calibrated_lines() == 10);
}

TEST_CASE("replay accepts flat, array and raw-frame lines and flags the rest") {
  TempDir dir;
  const auto path = dir / "r.log";
  {
    std::ofstream f(path);
    f << R"({"type":"header","schema":"copguide-log/1"})" << '\n';
    f << R"({"ts_ms":0,"tr_kg":20,"br_kg":20,"tl_kg":10,"bl_kg":10})" << '\n';
    f << R"({"ts":10,"kg":[20,20,10,10]})" << '\n';
    f << R"({"ts":20,"raw":"07D007D003E803E8"})" << '\n';  // 2000/2000/1000/1000 counts
    f << R"({"type":"event","ts":25})" << '\n';
    f << R"({"ts":30,"raw":"07D0"})" << '\n';   // truncated frame
    f << R"({"ts":5,"kg":[1,1,1,1]})" << '\n';  // goes backwards
    f << "nonsense\n";
    f << R"({"ts":40})" << '\n';             // no loads
    f << R"({"ts":50,"kg":[15,15,15,15]})";  // torn tail
  }
  ReplaySource src(path, {});
  const auto s = drain(src);
  REQUIRE(s.size() == 3);
  for (const auto& x : s) {
    CHECK(x.valid);
    CHECK(x.x == doctest::Approx(7.216666666666667));
    CHECK(x.y == 0.0);
  }
  CHECK(src.calibrated_lines() == 2);
  CHECK(src.raw_lines() == 1);
  CHECK(src.malformed_lines() == 5);
}

TEST_CASE("missing replay log is a source error") {
  try {
    ReplaySource src("/nonexistent/copguide.log", {});
    FAIL("expected kSourceUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSourceUnavailable);
  }
}

TEST_CASE("live source reads frames and counts a truncated tail") {
  TempDir dir;
  const auto path = dir / "frames.bin";
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < 5; ++i) {
    const auto f = copguide::testing::encode_frame({2000, 2000, 1000, 1000});
    bytes.insert(bytes.end(), f.begin(), f.end());
  }
  bytes.push_back(0x12);
  bytes.push_back(0x34);
  copguide::testing::write_bytes(path, bytes);

  LiveSource src(path, {}, LiveSource::tick_clock(10));
  const auto s = drain(src);
  REQUIRE(s.size() == 5);
  CHECK(s[0].ts == 0);
  CHECK(s[4].ts == 40);
  CHECK(s[2].x == doctest::Approx(7.216666666666667));
  CHECK(src.truncated_frames() == 1);

  CHECK_THROWS_AS(LiveSource("/nonexistent/dev", {}, LiveSource::tick_clock(10)), Error);
}

TEST_CASE("open_source builds each kind") {
  TempDir dir;
  copguide::testing::write_bytes(dir / "f.bin", {});
  SensorSettings sensor;
  CHECK(open_source(LiveSpec{dir / "f.bin", true, 100}, sensor)->kind() == "live");
  {
    std::ofstream(dir / "r.log") << "";
  }
  CHECK(open_source(ReplaySpec{dir / "r.log"}, sensor)->kind() == "replay");
  auto sim =
      open_source(SimulatedSpec{sim::ParticipantModel::defaults(), Modality::kAudio, {}}, sensor);
  CHECK(sim->kind() == "simulated");
  CHECK(sim->next()->valid);
}

TEST_CASE("session loop over a frame stream completes the schedule") {
  guidance::SessionConfig cfg;
  cfg.seed = 4;
  cfg.reps_per_target = 1;
  TempDir dir;
  copguide::testing::write_bytes(dir / "f.bin", copguide::testing::frames_for_session(cfg, 320));
  LiveSource src(dir / "f.bin", {}, LiveSource::tick_clock(10));
  const auto out = run_session_loop(cfg, {}, src, {});
  CHECK(out.finished);
  REQUIRE(out.records.size() == 8);
  CHECK(out.records[0].duration_s == 3.0);
  // Later trials are presented while the stream still stands on the
  // previous target for the rest of its block.
  for (const auto& r : out.records) {
    CHECK(r.success);
    CHECK(r.duration_s >= 3.0);
    CHECK(r.duration_s <= 3.2);
  }
}
