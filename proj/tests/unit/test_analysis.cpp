#include "copguide/analysis.hpp"
#include "copguide/error.hpp"
#include "doctest.h"

using namespace copguide;
using namespace copguide::gateway;

namespace {

// Three participants; audio 2 s slower; one failed haptic trial for P01.
AnalysisInput synthetic() {
  AnalysisInput in;
  in.sources = {"live"};
  const double base[3] = {6.0, 6.5, 7.0};
  const double vis[3] = {0.2, -0.3, 0.1};
  for (int p = 0; p < 3; ++p) {
    for (Modality m : kAllModalities) {
      for (int k = 0; k < 4; ++k) {
        double d = base[p] + 0.01 * k + (m == Modality::kAudio ? 2.0 + 0.05 * p : 0.0) +
                   (m == Modality::kVisual ? vis[p] : 0.0);
        in.trials.push_back({participant_id(p + 1), m, k, k % 8, true, d, d - 3.0});
      }
    }
  }
  in.trials.push_back({"P01", Modality::kHaptic, 4, 4, false, 60.0, 57.0});
  in.difficulty = {
      {"P01", Modality::kHaptic, 2}, {"P02", Modality::kHaptic, 3}, {"P01", Modality::kAudio, 6}};
  return in;
}

}  // namespace

TEST_CASE("participant ids") {
  CHECK(participant_id(1) == "P01");
  CHECK(participant_id(12) == "P12");
}

TEST_CASE("participant-mean analysis excludes failed trials") {
  const auto r = analyze(synthetic());
  CHECK(r.units == 3);
  REQUIRE(r.summaries.size() == 3);
  const auto& h = r.summaries[index_of(Modality::kHaptic)];
  CHECK(h.n == 3);
  CHECK(h.mean_s == doctest::Approx(6.5 + 0.015));
  CHECK(r.summaries_ex_dwell[0].mean_s == doctest::Approx(h.mean_s - 3.0));
  CHECK(r.failed_trials[index_of(Modality::kHaptic)] == 1);
  CHECK(r.tests[1].significant);  // haptic-audio
  CHECK(r.tests[2].significant);  // visual-audio
  CHECK_FALSE(r.tests[0].significant);
  CHECK(audio_gap_pattern(r));
  REQUIRE(r.difficulty.size() == 2);
  CHECK(r.difficulty[0].modality == Modality::kHaptic);
  CHECK(r.difficulty[0].mean == 2.5);
  CHECK_FALSE(r.difficulty[1].std);
  bool noted = false;
  for (const auto& n : r.notes) noted |= n.find("timed out") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("participants lacking a modality are excluded; too few units throw") {
  auto in = synthetic();
  std::erase_if(in.trials, [](const TrialRow& t) {
    return t.participant == "P03" && t.modality == Modality::kVisual;
  });
  const auto r = analyze(in);
  CHECK(r.units == 2);
  std::erase_if(in.trials, [](const TrialRow& t) { return t.participant == "P02"; });
  try {
    analyze(in);
    FAIL("expected kTooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooFewSamples);
  }
}

TEST_CASE("pooled analysis pairs by participant, target and repetition") {
  sim::CohortSpec spec;
  spec.keep_paths = false;
  const auto runs = sim::simulate_cohort(spec);
  const auto in = rows_from_runs(runs);
  CHECK(in.trials.size() == 18 * 24);
  const auto pooled = analyze(in, Unit::kPooledTrials);
  std::size_t failed = 0;
  for (auto f : pooled.failed_trials) failed += f;
  if (failed == 0) CHECK(pooled.units == 144);
  CHECK(pooled.unit_of_analysis.find("pooled") != std::string::npos);
  const auto means = analyze(in);
  CHECK(means.units == 6);
  bool synthetic_note = false;
  for (const auto& n : means.notes) synthetic_note |= n.find("simulated") != std::string::npos;
  CHECK(synthetic_note);
}

TEST_CASE("report renderings") {
  const auto r = analyze(synthetic());
  const auto j = report_to_json(r);
  CHECK(j["schema"] == "copguide-report/1");
  CHECK(j["tests"].size() == 3);
  CHECK(j["summaries"].size() == 3);
  CHECK(j["alpha"] == 0.05);
  const auto text = report_to_text(r);
  CHECK(text.find("haptic-audio") != std::string::npos);
  CHECK(text.find("n.s.") != std::string::npos);
  CHECK(text.find("Bonferroni") != std::string::npos);

  // Degenerate tests keep the JSON valid.
  auto in = synthetic();
  for (auto& t : in.trials) {
    if (t.modality == Modality::kVisual) t.duration_s = 100.0 + t.trial_no;
    if (t.modality == Modality::kHaptic) t.duration_s = 90.0 + t.trial_no;
  }
  const auto dj = report_to_json(analyze(in));
  CHECK(json::parse(dj.dump()) == dj);
}
