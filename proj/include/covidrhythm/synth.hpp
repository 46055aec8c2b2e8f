#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covidrhythm/ingest.hpp"

namespace covidrhythm {

// Infection-like disruption applied to an infected subject's labeled day.
struct Disruption {
  double amp_damp_fraction = 0.5;       // circadian amplitude scaled by 1-f
  double acrophase_shift_hours = 2.0;
  double extra_daytime_rest_fraction = 0.5;  // daytime activity suppressed
  double rhr_night_delta = 3.0;              // bpm added during night hours
};

struct CohortSpec {
  int n_healthy = 70;
  int n_infected = 25;
  int days_per_subject = 5;
  double rhr_base = 65.0;        // population mesor, bpm
  double rhr_base_jitter = 5.0;  // per-subject uniform jitter
  double rhr_amp = 4.0;          // circadian amplitude, bpm
  double rhr_amp_jitter = 1.0;
  double activity_elevation = 20.0;  // bpm added while stepping
  double day_step_rate = 40.0;   // mean steps/min in daytime active bouts
  double night_step_rate = 0.0;
  double active_dwell_minutes = 20.0;   // geometric mean dwell, day
  double rest_dwell_minutes = 40.0;
  double noise_std = 1.0;  // Gaussian noise on heart rate, bpm
  Disruption disruption;
  std::uint64_t seed = 42;
};

struct SubjectTruth {
  std::string subject_id;
  bool infected = false;
  double mesor = 0.0;
  double amplitude = 0.0;
  double acrophase_hours = 0.0;
  // Disrupted-day values (equal to the above for healthy subjects).
  double day_mesor = 0.0;
  double day_amplitude = 0.0;
  double day_acrophase_hours = 0.0;
  Instant labeled_day = 0;
};

struct SynthCohort {
  std::vector<SubjectStream> streams;
  std::vector<SubjectTruth> truth;
};

// Deterministic per seed. Generated heart-rate streams always pass the 10%
// missing gate (every minute is emitted).
SynthCohort generate(const CohortSpec& spec);

std::string truth_to_json(const SynthCohort& cohort, const CohortSpec& spec);

}  // namespace covidrhythm
