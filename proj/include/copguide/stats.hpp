#pragma once

// Descriptive statistics, the paired two-sided t-test, and Bonferroni
// adjustment across the three modality pairs.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "copguide/types.hpp"

namespace copguide::stats {

struct ModalitySummary {
  Modality modality = Modality::kHaptic;
  std::size_t n = 0;
  double mean_s = 0.0;
  double std_s = 0.0;  // sample std (n - 1)
};

/// Mean and sample std. Throws kTooFewSamples for n < 2.
ModalitySummary summarize(std::span<const double> values, Modality modality = Modality::kHaptic);

/// Regularised incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

enum class Degeneracy {
  kNone,
  kZeroDifferences,  // every difference is zero: t = 0, p = 1
  kZeroVariance,     // constant non-zero difference: t = +-inf, p = 0
};

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p_raw = 1.0;
  Degeneracy degenerate = Degeneracy::kNone;
};

/// Paired two-sided t-test on a - b. Throws kLengthMismatch and
/// kTooFewSamples; degenerate differences are flagged, not thrown.
TTestResult paired_t(std::span<const double> a, std::span<const double> b);

/// p_adj = min(1, m * p) with m = p_raws.size().
std::vector<double> bonferroni(std::span<const double> p_raws);

struct PairwiseTest {
  std::pair<Modality, Modality> pair;
  double t_stat = 0.0;
  int df = 0;
  double p_raw = 1.0;
  double p_adj = 1.0;
  bool significant = false;
  Degeneracy degenerate = Degeneracy::kNone;
};

struct DifficultySummary {
  Modality modality = Modality::kHaptic;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> std;  // absent for n < 2
};

struct StatsReport {
  std::vector<ModalitySummary> summaries;           // one per modality
  std::vector<ModalitySummary> summaries_ex_dwell;  // same, dwell window removed
  std::vector<PairwiseTest> tests;                  // (H,V), (H,A), (V,A)
  double alpha = 0.05;
  std::string unit_of_analysis;
  std::size_t units = 0;  // participants, or pooled trial pairs
  std::vector<DifficultySummary> difficulty;
  std::array<std::size_t, 3> failed_trials{};  // timed-out trials per modality
  std::vector<std::string> notes;
};

/// Columns are indexed by index_of(Modality) and aligned by unit (row i of
/// each column belongs to the same participant).
StatsReport compare_all(const std::array<std::vector<double>, 3>& columns, double alpha = 0.05);

DifficultySummary summarize_difficulty(std::span<const int> ratings, Modality modality);

}  // namespace copguide::stats
