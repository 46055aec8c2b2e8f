#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covidrhythm/preprocess.hpp"
#include "covidrhythm/timeutil.hpp"

namespace covidrhythm {

enum class HealthStatus { Healthy, CovidPositive };

struct SubjectStream {
  std::string subject_id;
  std::vector<std::pair<Instant, double>> heart_rate;  // bpm in (20, 250)
  std::vector<std::pair<Instant, double>> steps;       // count >= 0
  HealthStatus status = HealthStatus::Healthy;
  std::optional<Instant> symptom_onset;  // date at 00:00 UTC
};

struct Diagnostic {
  enum class Kind {
    MissingColumn,
    UnparseableRow,
    DuplicateTimestamp,
    InfectedWithoutOnset,
    NoEligibleDay,
    OutOfOrder,
  };
  Kind kind;
  std::string file;
  std::size_t line = 0;  // 0 when not row-scoped
  std::string message;
  bool is_error = false;  // duplicates/out-of-order are warnings
};

struct ParseResult {
  std::vector<SubjectStream> streams;  // sorted by subject_id
  std::vector<Diagnostic> diagnostics;
};

// Parses the three-file CSV contract (heart_rate.csv, steps.csv,
// labels.csv). Bad rows are collected as diagnostics, never fatal;
// duplicate timestamps resolve last-write-wins.
ParseResult parse_streams(const std::string& hr_path,
                          const std::string& steps_path,
                          const std::string& labels_path);

enum class DayLabel { Healthy, Infected };

struct LabeledDayRef {
  std::string subject_id;
  Instant day_start = 0;
  DayLabel label = DayLabel::Healthy;
};

struct MinuteGrids {
  std::vector<std::optional<double>> hr;     // 1440 slots
  std::vector<std::optional<double>> steps;  // 1440 slots
};

// Last observation within each minute wins; minutes without samples stay
// missing.
MinuteGrids resample_day(const SubjectStream& stream, Instant day_start);

// True iff the day's heart-rate grid passes the 10% missing gate.
bool day_eligible(const SubjectStream& stream, Instant day_start);

// One labeled 24h reference per eligible subject: infected days are pinned
// to onset-1, healthy days drawn by seeded uniform choice among eligible
// days. Subjects without an eligible day are dropped with a diagnostic.
std::vector<LabeledDayRef> select_labeled_days(
    const std::vector<SubjectStream>& streams, std::uint64_t rng_seed,
    std::vector<Diagnostic>* diagnostics = nullptr);

std::string serialize_streams_hr(const std::vector<SubjectStream>& streams);
std::string serialize_streams_steps(const std::vector<SubjectStream>& streams);
std::string serialize_streams_labels(const std::vector<SubjectStream>& streams);

}  // namespace covidrhythm
