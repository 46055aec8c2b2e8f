#include "covidrhythm/synth.hpp"

#include <cmath>

#include "covidrhythm/rng.hpp"
#include "json.hpp"

namespace covidrhythm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Cohort clock starts at 2020-03-01 00:00 UTC.
constexpr Instant kEpoch = 18322LL * kSecondsPerDay;

constexpr int kDayStartHour = 8;   // activity window
constexpr int kDayEndHour = 22;
constexpr int kNightEndHour = 8;   // night = 00:00..08:00

struct SubjectPlan {
  double mesor, amplitude, acrophase;
  double day_mesor, day_amplitude, day_acrophase;
};

void generate_subject(const CohortSpec& spec, const std::string& id,
                      bool infected, SynthCohort& out) {
  Rng rng(derive_seed(spec.seed, "subject:" + id));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  SubjectPlan plan;
  plan.mesor = spec.rhr_base + spec.rhr_base_jitter * uni(rng);
  plan.amplitude = std::max(0.0, spec.rhr_amp + spec.rhr_amp_jitter * uni(rng));
  plan.acrophase = 16.0 + 2.0 * uni(rng);  // afternoon peak
  plan.day_mesor = plan.mesor;
  plan.day_amplitude = plan.amplitude;
  plan.day_acrophase = plan.acrophase;
  if (infected) {
    plan.day_amplitude *= 1.0 - spec.disruption.amp_damp_fraction;
    plan.day_acrophase += spec.disruption.acrophase_shift_hours;
  }

  const int label_day_index = spec.days_per_subject - 2;
  const Instant labeled_day = kEpoch + static_cast<Instant>(label_day_index) *
                                           kSecondsPerDay;

  SubjectStream stream;
  stream.subject_id = id;
  stream.status = infected ? HealthStatus::CovidPositive : HealthStatus::Healthy;
  if (infected) stream.symptom_onset = labeled_day + kSecondsPerDay;

  bool active = false;
  bool bout_suppressed = false;
  for (int d = 0; d < spec.days_per_subject; ++d) {
    const bool disrupted = infected && d == label_day_index;
    const double amp = disrupted ? plan.day_amplitude : plan.amplitude;
    const double phase = disrupted ? plan.day_acrophase : plan.acrophase;
    for (int m = 0; m < kMinutesPerDay; ++m) {
      const Instant t = kEpoch + (static_cast<Instant>(d) * kMinutesPerDay + m) *
                                     kSecondsPerMinute;
      const double hour = m / 60.0;
      const bool daytime = hour >= kDayStartHour && hour < kDayEndHour;

      // Two-state activity process with geometric dwell times.
      const double leave_p =
          active ? 1.0 / spec.active_dwell_minutes : 1.0 / spec.rest_dwell_minutes;
      if (u01(rng) < leave_p) {
        active = !active;
        if (active)
          bout_suppressed =
              disrupted && u01(rng) < spec.disruption.extra_daytime_rest_fraction;
      }
      const double rate = daytime ? spec.day_step_rate : spec.night_step_rate;
      double steps = 0.0;
      if (active && !bout_suppressed && rate > 0.0) {
        std::poisson_distribution<int> pois(rate);
        steps = pois(rng);
      }

      double hr = plan.mesor + amp * std::cos(kTwoPi * (hour - phase) / 24.0);
      if (steps > 0.0) hr += spec.activity_elevation;
      if (disrupted && hour < kNightEndHour) hr += spec.disruption.rhr_night_delta;
      if (spec.noise_std > 0.0) hr += spec.noise_std * noise(rng);
      hr = std::min(249.0, std::max(21.0, hr));

      stream.heart_rate.emplace_back(t, hr);
      if (steps > 0.0) stream.steps.emplace_back(t, steps);
    }
  }

  out.streams.push_back(std::move(stream));
  out.truth.push_back({id, infected, plan.mesor, plan.amplitude,
                       plan.acrophase, plan.day_mesor, plan.day_amplitude,
                       plan.day_acrophase, labeled_day});
}

}  // namespace

SynthCohort generate(const CohortSpec& spec) {
  if (spec.days_per_subject < 2)
    throw ConfigError("need at least two days per subject");
  SynthCohort out;
  char id[16];
  for (int i = 0; i < spec.n_healthy; ++i) {
    std::snprintf(id, sizeof(id), "H%03d", i + 1);
    generate_subject(spec, id, false, out);
  }
  for (int i = 0; i < spec.n_infected; ++i) {
    std::snprintf(id, sizeof(id), "C%03d", i + 1);
    generate_subject(spec, id, true, out);
  }
  return out;
}

std::string truth_to_json(const SynthCohort& cohort, const CohortSpec& spec) {
  nlohmann::json j;
  j["seed"] = spec.seed;
  j["spec"] = {
      {"n_healthy", spec.n_healthy},
      {"n_infected", spec.n_infected},
      {"days_per_subject", spec.days_per_subject},
      {"rhr_base", spec.rhr_base},
      {"rhr_base_jitter", spec.rhr_base_jitter},
      {"rhr_amp", spec.rhr_amp},
      {"rhr_amp_jitter", spec.rhr_amp_jitter},
      {"activity_elevation", spec.activity_elevation},
      {"day_step_rate", spec.day_step_rate},
      {"night_step_rate", spec.night_step_rate},
      {"active_dwell_minutes", spec.active_dwell_minutes},
      {"rest_dwell_minutes", spec.rest_dwell_minutes},
      {"noise_std", spec.noise_std},
      {"disruption",
       {{"amp_damp_fraction", spec.disruption.amp_damp_fraction},
        {"acrophase_shift_hours", spec.disruption.acrophase_shift_hours},
        {"extra_daytime_rest_fraction",
         spec.disruption.extra_daytime_rest_fraction},
        {"rhr_night_delta", spec.disruption.rhr_night_delta}}},
  };
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& t : cohort.truth) {
    subjects.push_back({{"subject_id", t.subject_id},
                        {"infected", t.infected},
                        {"mesor", t.mesor},
                        {"amplitude", t.amplitude},
                        {"acrophase_hours", t.acrophase_hours},
                        {"day_mesor", t.day_mesor},
                        {"day_amplitude", t.day_amplitude},
                        {"day_acrophase_hours", t.day_acrophase_hours},
                        {"labeled_day", format_date(t.labeled_day)}});
  }
  j["subjects"] = std::move(subjects);
  return j.dump(2);
}

}  // namespace covidrhythm
