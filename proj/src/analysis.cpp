#include "copguide/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "copguide/error.hpp"

namespace copguide::gateway {

std::string participant_id(int participant) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%02d", participant);
  return buf;
}

namespace {

void sort_rows(std::vector<TrialRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tie(a.participant, a.modality, a.trial_no) <
           std::tie(b.participant, b.modality, b.trial_no);
  });
}

std::string_view degeneracy_name(stats::Degeneracy d) {
  switch (d) {
    case stats::Degeneracy::kNone: return "none";
    case stats::Degeneracy::kZeroDifferences: return "zero_differences";
    case stats::Degeneracy::kZeroVariance: return "zero_variance";
  }
  return "none";
}

}  // namespace

AnalysisInput rows_from_runs(const std::vector<sim::SessionRun>& runs) {
  AnalysisInput in;
  for (const auto& run : runs) {
    in.sources.emplace_back("simulated");
    for (const auto& r : run.records) {
      in.trials.push_back({participant_id(run.plan.participant), run.plan.modality, r.trial_no,
                           r.target.index, r.success, r.duration_s, r.duration_ex_dwell_s});
    }
  }
  sort_rows(in.trials);
  return in;
}

AnalysisInput rows_from_logs(const std::vector<std::filesystem::path>& logs) {
  AnalysisInput in;
  for (const auto& path : logs) {
    const auto log = read_log(path);
    in.sources.push_back(log.header.source);
    for (const auto& r : log.trials) {
      in.trials.push_back({log.header.participant, log.header.modality, r.trial_no, r.target.index,
                           r.success, r.duration_s, r.duration_ex_dwell_s});
    }
    in.difficulty.insert(in.difficulty.end(), log.difficulty.begin(), log.difficulty.end());
  }
  sort_rows(in.trials);
  return in;
}

stats::StatsReport analyze(const AnalysisInput& input, Unit unit, double alpha) {
  std::array<std::vector<double>, 3> cols;
  std::array<std::vector<double>, 3> cols_ex;
  std::array<std::size_t, 3> failed{};
  std::vector<std::string> notes;

  for (const auto& row : input.trials) {
    if (!row.success) ++failed[index_of(row.modality)];
  }

  if (unit == Unit::kParticipantMeans) {
    // participant -> modality -> (sum, sum_ex, count)
    std::map<std::string, std::array<std::tuple<double, double, std::size_t>, 3>> acc;
    for (const auto& row : input.trials) {
      auto& slot = acc[row.participant][index_of(row.modality)];
      if (!row.success) continue;
      std::get<0>(slot) += row.duration_s;
      std::get<1>(slot) += row.duration_ex_dwell_s;
      std::get<2>(slot) += 1;
    }
    for (const auto& [participant, per_mod] : acc) {
      const bool complete = std::all_of(per_mod.begin(), per_mod.end(),
                                        [](const auto& s) { return std::get<2>(s) > 0; });
      if (!complete) {
        notes.push_back("participant " + participant + " lacks a modality; excluded");
        continue;
      }
      for (std::size_t m = 0; m < 3; ++m) {
        const auto n = static_cast<double>(std::get<2>(per_mod[m]));
        cols[m].push_back(std::get<0>(per_mod[m]) / n);
        cols_ex[m].push_back(std::get<1>(per_mod[m]) / n);
      }
    }
  } else {
    // (participant, target, k-th presentation of that target) -> durations
    using Key = std::tuple<std::string, int, int>;
    std::map<Key, std::array<std::optional<std::pair<double, double>>, 3>> acc;
    std::map<std::tuple<std::string, int, int>, int> occurrence;
    for (const auto& row : input.trials) {
      const int k = occurrence[{row.participant, static_cast<int>(index_of(row.modality)),
                                row.target_index}]++;
      if (!row.success) continue;
      acc[{row.participant, row.target_index, k}][index_of(row.modality)] =
          std::pair{row.duration_s, row.duration_ex_dwell_s};
    }
    for (const auto& [key, per_mod] : acc) {
      if (!std::all_of(per_mod.begin(), per_mod.end(),
                       [](const auto& v) { return v.has_value(); })) {
        continue;
      }
      for (std::size_t m = 0; m < 3; ++m) {
        cols[m].push_back(per_mod[m]->first);
        cols_ex[m].push_back(per_mod[m]->second);
      }
    }
  }

  if (cols[0].size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "need at least two paired units with all three modalities, have " +
                    std::to_string(cols[0].size()));
  }

  auto report = stats::compare_all(cols, alpha);
  for (Modality m : kAllModalities) {
    report.summaries_ex_dwell.push_back(stats::summarize(cols_ex[index_of(m)], m));
  }
  report.unit_of_analysis = unit == Unit::kParticipantMeans
                                ? "participant means (paired over participants)"
                                : "pooled trials (paired by participant, target, repetition)";
  for (Modality m : kAllModalities) {
    std::vector<int> ratings;
    for (const auto& d : input.difficulty) {
      if (d.modality == m) ratings.push_back(d.rating);
    }
    if (!ratings.empty()) report.difficulty.push_back(stats::summarize_difficulty(ratings, m));
  }
  for (Modality m : kAllModalities) {
    if (failed[index_of(m)] > 0) {
      notes.push_back(std::to_string(failed[index_of(m)]) + " " + std::string(to_string(m)) +
                      " trial(s) timed out and were excluded");
    }
  }
  if (std::any_of(input.sources.begin(), input.sources.end(),
                  [](const std::string& s) { return s == "simulated"; })) {
    notes.push_back("includes simulated sessions: synthetic participant parameters");
  }
  for (const auto& t : report.tests) {
    if (t.degenerate != stats::Degeneracy::kNone) {
      notes.push_back(std::string(to_string(t.pair.first)) + "/" +
                      std::string(to_string(t.pair.second)) + " test is degenerate (" +
                      std::string(degeneracy_name(t.degenerate)) + ")");
    }
  }
  report.notes = std::move(notes);
  report.failed_trials = failed;
  return report;
}

bool audio_gap_pattern(const stats::StatsReport& report) {
  bool hv = true, ha = false, va = false;
  for (const auto& t : report.tests) {
    const auto [a, b] = t.pair;
    if (a == Modality::kHaptic && b == Modality::kVisual) hv = t.significant;
    if (a == Modality::kHaptic && b == Modality::kAudio) ha = t.significant;
    if (a == Modality::kVisual && b == Modality::kAudio) va = t.significant;
  }
  return !hv && ha && va;
}

json report_to_json(const stats::StatsReport& report) {
  auto summary_json = [](const stats::ModalitySummary& s) {
    return json{{"modality", std::string(to_string(s.modality))},
                {"n", s.n},
                {"mean_s", s.mean_s},
                {"std_s", s.std_s}};
  };
  json j;
  j["schema"] = "copguide-report/1";
  j["alpha"] = report.alpha;
  j["correction"] = "bonferroni";
  j["comparisons"] = report.tests.size();
  j["test"] = "paired two-sided t";
  j["unit_of_analysis"] = report.unit_of_analysis;
  j["units"] = report.units;
  j["summaries"] = json::array();
  for (const auto& s : report.summaries) j["summaries"].push_back(summary_json(s));
  j["summaries_ex_dwell"] = json::array();
  for (const auto& s : report.summaries_ex_dwell)
    j["summaries_ex_dwell"].push_back(summary_json(s));
  j["tests"] = json::array();
  for (const auto& t : report.tests) {
    json tj = {
        {"pair", {std::string(to_string(t.pair.first)), std::string(to_string(t.pair.second))}},
        {"df", t.df},
        {"p_raw", t.p_raw},
        {"p_adj", t.p_adj},
        {"significant", t.significant},
        {"degenerate", std::string(degeneracy_name(t.degenerate))}};
    // JSON has no infinity.
    tj["t"] = std::isfinite(t.t_stat) ? json(t.t_stat) : json(t.t_stat > 0 ? "inf" : "-inf");
    j["tests"].push_back(tj);
  }
  j["difficulty"] = json::array();
  for (const auto& d : report.difficulty) {
    j["difficulty"].push_back({{"modality", std::string(to_string(d.modality))},
                               {"n", d.n},
                               {"mean", d.mean},
                               {"std", d.std ? json(*d.std) : json(nullptr)}});
  }
  j["failed_trials"] = {{"haptic", report.failed_trials[0]},
                        {"visual", report.failed_trials[1]},
                        {"audio", report.failed_trials[2]}};
  j["notes"] = report.notes;
  return j;
}

std::string report_to_text(const stats::StatsReport& report) {
  std::ostringstream out;
  char line[256];
  out << "Unit of analysis: " << report.unit_of_analysis << " (n = " << report.units << ")\n";
  std::snprintf(line, sizeof line, "%-8s %5s %18s %18s\n", "modality", "n", "time [s]",
                "excl. dwell [s]");
  out << line;
  for (std::size_t i = 0; i < report.summaries.size(); ++i) {
    const auto& s = report.summaries[i];
    const auto* ex = i < report.summaries_ex_dwell.size() ? &report.summaries_ex_dwell[i] : nullptr;
    std::snprintf(line, sizeof line, "%-8s %5zu %8.2f +- %6.2f %8.2f +- %6.2f\n",
                  std::string(to_string(s.modality)).c_str(), s.n, s.mean_s, s.std_s,
                  ex ? ex->mean_s : 0.0, ex ? ex->std_s : 0.0);
    out << line;
  }
  out << "\nPaired two-sided t, Bonferroni m=" << report.tests.size() << ", alpha=" << report.alpha
      << "\n";
  std::snprintf(line, sizeof line, "%-16s %9s %4s %11s %11s %s\n", "pair", "t", "df", "p_raw",
                "p_adj", "sig");
  out << line;
  for (const auto& t : report.tests) {
    const std::string pair =
        std::string(to_string(t.pair.first)) + "-" + std::string(to_string(t.pair.second));
    const char* marker = !t.significant    ? "n.s."
                         : t.p_adj < 0.001 ? "***"
                         : t.p_adj < 0.01  ? "**"
                                           : "*";
    std::snprintf(line, sizeof line, "%-16s %9.3f %4d %11.3e %11.3e %s\n", pair.c_str(), t.t_stat,
                  t.df, t.p_raw, t.p_adj, marker);
    out << line;
  }
  if (!report.difficulty.empty()) {
    out << "\nDifficulty (1 easy .. 7 difficult)\n";
    for (const auto& d : report.difficulty) {
      if (d.std) {
        std::snprintf(line, sizeof line, "%-8s n=%zu %.2f +- %.2f\n",
                      std::string(to_string(d.modality)).c_str(), d.n, d.mean, *d.std);
      } else {
        std::snprintf(line, sizeof line, "%-8s n=%zu %.2f\n",
                      std::string(to_string(d.modality)).c_str(), d.n, d.mean);
      }
      out << line;
    }
  }
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  return out.str();
}

}  // namespace copguide::gateway
