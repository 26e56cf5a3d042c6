#include <algorithm>
#include <cmath>
#include <numbers>

#include "copguide/error.hpp"
#include "copguide/guidance.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace copguide;
using namespace copguide::guidance;
using copguide::testing::sample_at;

struct ScheduleOracleCase {
  std::uint64_t seed;
  std::vector<int> schedule;
};
#include "schedule_oracle.inc"

namespace {

SessionConfig one_rep(std::uint64_t seed = 1) {
  SessionConfig cfg;
  cfg.seed = seed;
  return cfg;
}

std::vector<EventKind> kinds(const StepResult& r) {
  std::vector<EventKind> k;
  for (const auto& e : r.events) k.push_back(e.kind);
  return k;
}

// Feeds samples at the active target from ts0 to ts1 inclusive in 10 ms
// ticks; returns the first completed record.
std::optional<TrialRecord> hold(SessionState& s, TimestampMs ts0, TimestampMs ts1, Vec2 pos) {
  for (TimestampMs t = ts0; t <= ts1; t += 10) {
    auto r = s.step(sample_at(t, pos.x, pos.y));
    if (r.completed) return r.completed;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("targets sit on the 8 cm ring at 45 degree steps") {
  const auto t = make_targets(SessionConfig{});
  CHECK(t[0].x == 8.0);
  CHECK(t[0].y == 0.0);
  CHECK(t[2].x == 0.0);
  CHECK(t[2].y == 8.0);
  CHECK(t[4].x == -8.0);
  CHECK(t[5].x == doctest::Approx(-5.656854249492381));
  CHECK(t[5].y == doctest::Approx(-5.656854249492381));
  for (int i = 0; i < kTargetCount; ++i) {
    CHECK(t[i].index == i);
    CHECK(std::hypot(t[i].x, t[i].y) == doctest::Approx(8.0));
    const double angle = std::atan2(t[i].y, t[i].x) * 180.0 / std::numbers::pi;
    CHECK(std::remainder(angle - 45.0 * i, 360.0) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("schedule is a seeded permutation of the repeated target set") {
  auto cfg = one_rep(11);
  const auto a = make_schedule(cfg);
  CHECK(a.size() == 24);
  for (int i = 0; i < kTargetCount; ++i) CHECK(std::count(a.begin(), a.end(), i) == 3);
  CHECK(make_schedule(cfg) == a);
  cfg.seed = 12;
  CHECK(make_schedule(cfg) != a);

  cfg.reps_per_target = 1;
  auto p = make_schedule(cfg);
  std::sort(p.begin(), p.end());
  CHECK(p == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("schedule matches the reference shuffle") {
  for (const auto& c : kScheduleGrid) {
    SessionConfig cfg;
    cfg.seed = c.seed;
    CHECK(make_schedule(cfg) == c.schedule);
  }
}

TEST_CASE("config validation") {
  SessionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.region_radius_cm = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.tick_hz = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.reps_per_target = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(SessionConfig{}.dwell_ms() == 3000);
  CHECK(SessionConfig{}.tick_ms() == 10);
  CHECK(SessionConfig{}.max_trial_ms() == 60000);
}

TEST_CASE("first sample presents the first trial") {
  SessionState s(one_rep());
  auto r = s.step(sample_at(0, 0, 0));
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].kind == EventKind::kTrialPresented);
  CHECK(r.events[0].trial_no == 0);
  CHECK(r.events[0].target_index == s.schedule()[0]);
  CHECK(s.phase().kind == PhaseKind::kGuiding);
  CHECK(s.active_target()->index == s.schedule()[0]);
}

TEST_CASE("exactly three seconds of dwell completes, 2.99 s does not") {
  SessionState s(one_rep());
  s.step(sample_at(0, 0, 0));
  const Vec2 at = s.active_target()->position();

  SessionState a = s;
  CHECK_FALSE(hold(a, 10, 10 + 2990, at));  // 2.99 s in region
  CHECK(a.in_region());

  auto rec = hold(s, 10, 10 + 3000, at);
  REQUIRE(rec);
  CHECK(rec->success);
  CHECK(rec->success_ts == 3010);
  CHECK(rec->duration_s == 3.01);
  CHECK(rec->duration_ex_dwell_s == doctest::Approx(0.01));
}

TEST_CASE("a single tick outside restarts the dwell timer") {
  SessionState s(one_rep());
  s.step(sample_at(0, 0, 0));
  const Vec2 at = s.active_target()->position();
  CHECK_FALSE(hold(s, 10, 2900, at));
  auto r = s.step(sample_at(2910, 0, 0));
  CHECK(kinds(r) == std::vector{EventKind::kRegionExited});
  CHECK_FALSE(hold(s, 2920, 2920 + 2990, at));
  auto rec = hold(s, 2920 + 3000, 2920 + 3000, at);
  REQUIRE(rec);
  CHECK(rec->success_ts == 5920);
}

TEST_CASE("region boundary is inclusive") {
  // Target 0 is (8, 0); (5, 0) is exactly 3 cm away.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SessionState x(one_rep(seed));
    if (x.schedule()[0] != 0) continue;
    x.step(sample_at(0, 0, 0));
    CHECK(kinds(x.step(sample_at(10, 5.0, 0.0))) == std::vector{EventKind::kRegionEntered});
    SessionState y(one_rep(seed));
    y.step(sample_at(0, 0, 0));
    CHECK(y.step(sample_at(10, std::nextafter(5.0, 0.0), 0.0)).events.empty());
    break;
  }
}

TEST_CASE("invalid samples freeze phase transitions") {
  SessionState s(one_rep());
  s.step(sample_at(0, 0, 0));
  const Vec2 at = s.active_target()->position();
  s.step(sample_at(10, at.x, at.y));
  CHECK(s.in_region());
  // Invalid samples do not exit the region, nor complete it.
  for (TimestampMs t = 20; t <= 4000; t += 10) {
    auto r = s.step(sample_at(t, 0, 0, false));
    CHECK(r.events.empty());
  }
  CHECK(s.in_region());
  CHECK(s.ignored_invalid() == 399);
  // The next valid in-region sample completes since the timer kept running.
  auto r = s.step(sample_at(4010, at.x, at.y));
  CHECK(r.completed);
}

TEST_CASE("out-of-order samples are rejected without touching the state") {
  SessionState s(one_rep());
  s.step(sample_at(100, 0, 0));
  const auto before = s.phase();
  try {
    s.step(sample_at(90, 0, 0));
    FAIL("expected kOutOfOrderSample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfOrderSample);
  }
  CHECK(s.phase().kind == before.kind);
  CHECK_NOTHROW(s.step(sample_at(100, 0, 0)));  // equal timestamps are fine
}

TEST_CASE("timeout closes the trial as failed") {
  auto cfg = one_rep();
  cfg.max_trial_s = 5;
  SessionState s(cfg);
  std::optional<TrialRecord> rec;
  StepResult last;
  for (TimestampMs t = 0; !rec; t += 10) {
    last = s.step(sample_at(t, 0, 0));
    rec = last.completed;
  }
  CHECK_FALSE(rec->success);
  CHECK(rec->success_ts == 5000);
  CHECK(rec->duration_s == 5.0);
  CHECK(kinds(last) == std::vector{EventKind::kTrialComplete});
}

TEST_CASE("a full session emits every trial, presents on the following tick, then finishes") {
  auto cfg = one_rep(3);
  SessionState s(cfg);
  std::vector<TrialRecord> recs;
  std::vector<GuidanceEvent> events;
  TimestampMs t = 0;
  while (!s.finished()) {
    Vec2 pos{0, 0};
    if (auto tgt = s.active_target()) pos = tgt->position();
    auto r = s.step(sample_at(t, pos.x, pos.y));
    events.insert(events.end(), r.events.begin(), r.events.end());
    if (r.completed) {
      CHECK_FALSE(s.active_target());
      CHECK_THROWS_AS(s.error_vector(sample_at(t, 0, 0)), Error);
      recs.push_back(*r.completed);
    }
    t += 10;
  }
  REQUIRE(recs.size() == 24);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].trial_no == static_cast<int>(i));
    CHECK(recs[i].target.index == s.schedule()[i]);
    if (i > 0) CHECK(recs[i].present_ts == recs[i - 1].success_ts + 10);
    CHECK(recs[i].duration_s ==
          doctest::Approx((recs[i].success_ts - recs[i].present_ts) / 1000.0));
    // The final dwell window of the path is inside the region.
    for (const auto& p : recs[i].path) {
      if (p.ts >= recs[i].success_ts - cfg.dwell_ms()) {
        CHECK(norm(p.position() - recs[i].target.position()) <= cfg.region_radius_cm);
      }
    }
  }
  CHECK(events.back().kind == EventKind::kSessionFinished);
  CHECK(std::count_if(events.begin(), events.end(),
                      [](const auto& e) { return e.kind == EventKind::kTrialComplete; }) == 24);
  CHECK_THROWS_AS(s.step(sample_at(t, 0, 0)), Error);
}

TEST_CASE("error vector examples") {
  for (std::uint64_t seed = 0;; ++seed) {
    SessionState s(one_rep(seed));
    if (s.schedule()[0] != 2) continue;
    s.step(sample_at(0, 0, 0));
    const Vec2 e = s.error_vector(sample_at(0, 8, 0));
    CHECK(e.x == -8.0);
    CHECK(e.y == 8.0);
    CHECK(s.error_vector(sample_at(0, 0, 8)) == Vec2{0, 0});
    break;
  }
}

TEST_CASE("step is a pure function of state and sample") {
  SessionState a(one_rep(4));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<CoPSample> stream;
  for (int i = 0; i < 3000; ++i) stream.push_back(sample_at(i * 10, u(rng), u(rng), i % 17 != 0));
  SessionState b = a;
  for (const auto& smp : stream) {
    auto [next, r] = step(b, smp);
    auto ra = a.step(smp);
    b = next;
    CHECK(kinds(r) == kinds(ra));
  }
  CHECK(a.trial_no() == b.trial_no());
  CHECK(a.phase().kind == b.phase().kind);
}

TEST_CASE("event kind names round-trip") {
  for (auto k : {EventKind::kTrialPresented, EventKind::kRegionEntered, EventKind::kRegionExited,
                 EventKind::kTrialComplete, EventKind::kSessionFinished}) {
    CHECK(parse_event_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_event_kind("bogus"));
}
