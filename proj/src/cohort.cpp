#include "copguide/cohort.hpp"

#include <exception>
#include <random>

#include "copguide/error.hpp"

namespace copguide::sim {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  h = mix(h ^ a);
  h = mix(h ^ b);
  return mix(h ^ c);
}

std::vector<SessionPlan> plan_cohort(const CohortSpec& spec) {
  if (spec.participants < 1) throw Error(ErrorCode::kInvalidConfig, "participants must be >= 1");
  if (spec.jitter < 0.0 || spec.jitter >= 1.0) {
    throw Error(ErrorCode::kInvalidConfig, "jitter must be in [0, 1)");
  }
  spec.session.validate();
  spec.model.validate();

  std::vector<SessionPlan> plans;
  for (int p = 1; p <= spec.participants; ++p) {
    ParticipantModel person = spec.model;
    if (spec.jitter > 0.0) {
      // One set of factors per person, shared by all modalities.
      std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(p), 0x6a));
      std::uniform_real_distribution<double> factor(1.0 - spec.jitter, 1.0 + spec.jitter);
      const double latency_f = factor(rng);
      const double speed_f = factor(rng);
      const double noise_f = factor(rng);
      for (auto& m : person.per_modality) {
        m.latency_mean_ms *= latency_f;
        m.latency_std_ms *= latency_f;
        m.speed_cm_s *= speed_f;
        m.direction_noise_deg *= noise_f;
      }
    }
    for (Modality mod : spec.modalities) {
      SessionPlan plan;
      plan.participant = p;
      plan.modality = mod;
      plan.session = spec.session;
      plan.session.modality = mod;
      const auto mi = static_cast<std::uint64_t>(index_of(mod)) + 1;
      plan.session.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(p), mi, 0x5c);
      plan.model = person;
      plan.model.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(p), mi, 0x3d);
      plans.push_back(plan);
    }
  }
  return plans;
}

std::vector<SessionRun> simulate_cohort(const CohortSpec& spec) {
  const auto plans = plan_cohort(spec);
  std::vector<SessionRun> runs(plans.size());
  // Exceptions must not escape the parallel region.
  std::vector<std::exception_ptr> errors(plans.size());
  const auto n = static_cast<std::ptrdiff_t>(plans.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      runs[i].plan = plans[i];
      runs[i].records =
          run_session(plans[i].model, plans[i].session, spec.encoder, spec.keep_paths, spec.sensor);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

std::vector<SessionRun> simulate_cohort_serial(const CohortSpec& spec) {
  const auto plans = plan_cohort(spec);
  std::vector<SessionRun> runs;
  runs.reserve(plans.size());
  for (const auto& plan : plans) {
    runs.push_back(
        {plan, run_session(plan.model, plan.session, spec.encoder, spec.keep_paths, spec.sensor)});
  }
  return runs;
}

}  // namespace copguide::sim
