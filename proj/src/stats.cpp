#include "copguide/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copguide/error.hpp"

namespace copguide::stats {

ModalitySummary summarize(std::span<const double> values, Modality modality) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "need at least two values for a sample std");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {modality, values.size(), mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with y = 1 - x supplied separately so callers can avoid
// cancellation when x is close to 1.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x, y), 0.0, 1.0);
}

TTestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "paired columns differ in length");
  }
  if (a.size() < 2) throw Error(ErrorCode::kTooFewSamples, "paired t needs n >= 2");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  bool all_zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    all_zero = all_zero && d[i] == 0.0;
  }
  TTestResult r;
  r.df = static_cast<int>(n) - 1;
  if (all_zero) {
    r.t = 0.0;
    r.p_raw = 1.0;
    r.degenerate = Degeneracy::kZeroDifferences;
    return r;
  }
  const auto s = summarize(d);
  if (s.std_s == 0.0) {
    r.t = std::copysign(std::numeric_limits<double>::infinity(), s.mean_s);
    r.p_raw = 0.0;
    r.degenerate = Degeneracy::kZeroVariance;
    return r;
  }
  r.t = s.mean_s / (s.std_s / std::sqrt(static_cast<double>(n)));
  r.p_raw = student_t_two_sided_p(r.t, r.df);
  return r;
}

std::vector<double> bonferroni(std::span<const double> p_raws) {
  const double m = static_cast<double>(p_raws.size());
  std::vector<double> out;
  out.reserve(p_raws.size());
  for (double p : p_raws) out.push_back(std::min(1.0, m * p));
  return out;
}

StatsReport compare_all(const std::array<std::vector<double>, 3>& columns, double alpha) {
  StatsReport report;
  report.alpha = alpha;
  report.units = columns[0].size();
  for (Modality m : kAllModalities) {
    report.summaries.push_back(summarize(columns[index_of(m)], m));
  }
  const std::array<std::pair<Modality, Modality>, 3> pairs = {{
      {Modality::kHaptic, Modality::kVisual},
      {Modality::kHaptic, Modality::kAudio},
      {Modality::kVisual, Modality::kAudio},
  }};
  std::vector<double> raws;
  for (const auto& [first, second] : pairs) {
    const auto r = paired_t(columns[index_of(first)], columns[index_of(second)]);
    PairwiseTest test;
    test.pair = {first, second};
    test.t_stat = r.t;
    test.df = r.df;
    test.p_raw = r.p_raw;
    test.degenerate = r.degenerate;
    report.tests.push_back(test);
    raws.push_back(r.p_raw);
  }
  const auto adj = bonferroni(raws);
  for (std::size_t i = 0; i < report.tests.size(); ++i) {
    report.tests[i].p_adj = adj[i];
    report.tests[i].significant = adj[i] < alpha;
  }
  return report;
}

DifficultySummary summarize_difficulty(std::span<const int> ratings, Modality modality) {
  DifficultySummary s;
  s.modality = modality;
  s.n = ratings.size();
  if (ratings.empty()) return s;
  std::vector<double> v(ratings.begin(), ratings.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() >= 2) s.std = summarize(v, modality).std_s;
  return s;
}

}  // namespace copguide::stats
