#include "covidrhythm/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "covidrhythm/csv.hpp"
#include "covidrhythm/rng.hpp"

namespace covidrhythm {

namespace {

constexpr double kBpmLow = 20.0, kBpmHigh = 250.0;

struct RawSeries {
  std::map<std::string, std::map<Instant, double>> by_subject;
};

bool parse_number(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

// Shared reader for the two sample files. Values are range-checked by the
// caller-provided predicate; duplicates resolve last-write-wins.
RawSeries read_samples(const std::string& path, const std::string& value_col,
                       bool (*valid)(double), std::vector<Diagnostic>& diags) {
  RawSeries out;
  csv::Table t;
  try {
    t = csv::read_file(path);
  } catch (const ParseError& e) {
    diags.push_back({Diagnostic::Kind::MissingColumn, path, 0, e.what(), true});
    return out;
  }
  if (t.header.empty()) return out;  // empty file: vacuous

  std::size_t ci, ct, cv;
  try {
    ci = t.column("subject_id");
    ct = t.column("timestamp");
    cv = t.column(value_col);
  } catch (const ParseError& e) {
    diags.push_back({Diagnostic::Kind::MissingColumn, path, 1, e.what(), true});
    return out;
  }

  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.line_numbers[r];
    if (row.size() <= std::max({ci, ct, cv})) {
      diags.push_back({Diagnostic::Kind::UnparseableRow, path, line,
                       "too few fields", true});
      continue;
    }
    const auto ts = parse_iso8601(row[ct]);
    double value = 0.0;
    if (!ts || !parse_number(row[cv], value) || !valid(value)) {
      diags.push_back({Diagnostic::Kind::UnparseableRow, path, line,
                       "bad timestamp or out-of-range value", true});
      continue;
    }
    auto& series = out.by_subject[row[ci]];
    if (auto it = series.find(*ts); it != series.end()) {
      diags.push_back({Diagnostic::Kind::DuplicateTimestamp, path, line,
                       "duplicate timestamp, later row wins", false});
      it->second = value;
    } else {
      series.emplace(*ts, value);
    }
  }
  return out;
}

bool valid_bpm(double v) { return v > kBpmLow && v < kBpmHigh; }
bool valid_steps(double v) { return v >= 0.0; }

}  // namespace

ParseResult parse_streams(const std::string& hr_path,
                          const std::string& steps_path,
                          const std::string& labels_path) {
  ParseResult result;
  RawSeries hr = read_samples(hr_path, "bpm", valid_bpm, result.diagnostics);
  RawSeries st =
      read_samples(steps_path, "steps", valid_steps, result.diagnostics);

  struct LabelRow {
    HealthStatus status;
    std::optional<Instant> onset;
  };
  std::map<std::string, LabelRow> labels;
  {
    csv::Table t = csv::read_file(labels_path);
    if (!t.header.empty()) {
      const std::size_t ci = t.column("subject_id");
      const std::size_t cs = t.column("status");
      const std::size_t co = t.column("symptom_onset");
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::size_t line = t.line_numbers[r];
        if (row.size() <= std::max({ci, cs, co})) {
          result.diagnostics.push_back({Diagnostic::Kind::UnparseableRow,
                                        labels_path, line, "too few fields",
                                        true});
          continue;
        }
        LabelRow lr;
        if (row[cs] == "healthy") {
          lr.status = HealthStatus::Healthy;
        } else if (row[cs] == "covid") {
          lr.status = HealthStatus::CovidPositive;
        } else {
          result.diagnostics.push_back({Diagnostic::Kind::UnparseableRow,
                                        labels_path, line,
                                        "unknown status '" + row[cs] + "'",
                                        true});
          continue;
        }
        if (!row[co].empty()) {
          lr.onset = parse_date(row[co]);
          if (!lr.onset) {
            result.diagnostics.push_back({Diagnostic::Kind::UnparseableRow,
                                          labels_path, line,
                                          "bad symptom_onset date", true});
            continue;
          }
        }
        if (lr.status == HealthStatus::CovidPositive && !lr.onset) {
          result.diagnostics.push_back({Diagnostic::Kind::InfectedWithoutOnset,
                                        labels_path, line,
                                        "covid status requires symptom_onset",
                                        true});
          continue;
        }
        labels[row[ci]] = lr;
      }
    }
  }

  std::set<std::string> subjects;
  for (const auto& [id, _] : hr.by_subject) subjects.insert(id);
  for (const auto& [id, _] : st.by_subject) subjects.insert(id);
  for (const auto& id : subjects) {
    SubjectStream s;
    s.subject_id = id;
    if (auto it = labels.find(id); it != labels.end()) {
      s.status = it->second.status;
      s.symptom_onset = it->second.onset;
    }
    if (auto it = hr.by_subject.find(id); it != hr.by_subject.end())
      s.heart_rate.assign(it->second.begin(), it->second.end());
    if (auto it = st.by_subject.find(id); it != st.by_subject.end())
      s.steps.assign(it->second.begin(), it->second.end());
    result.streams.push_back(std::move(s));
  }
  return result;
}

MinuteGrids resample_day(const SubjectStream& stream, Instant day_start) {
  MinuteGrids g;
  g.hr.assign(kMinutesPerDay, std::nullopt);
  g.steps.assign(kMinutesPerDay, std::nullopt);
  const Instant day_end = day_start + kSecondsPerDay;

  auto fill = [&](const std::vector<std::pair<Instant, double>>& samples,
                  std::vector<std::optional<double>>& grid, bool accumulate) {
    auto lo = std::lower_bound(
        samples.begin(), samples.end(), std::make_pair(day_start, -1.0));
    for (auto it = lo; it != samples.end() && it->first < day_end; ++it) {
      const int minute =
          static_cast<int>((it->first - day_start) / kSecondsPerMinute);
      if (accumulate && grid[minute].has_value())
        grid[minute] = *grid[minute] + it->second;
      else
        grid[minute] = it->second;  // last observation in the minute wins
    }
  };
  fill(stream.heart_rate, g.hr, false);
  fill(stream.steps, g.steps, true);
  return g;
}

bool day_eligible(const SubjectStream& stream, Instant day_start) {
  return gate_missing(resample_day(stream, day_start).hr);
}

std::vector<LabeledDayRef> select_labeled_days(
    const std::vector<SubjectStream>& streams, std::uint64_t rng_seed,
    std::vector<Diagnostic>* diagnostics) {
  std::vector<LabeledDayRef> refs;
  for (const auto& s : streams) {
    if (s.status == HealthStatus::CovidPositive) {
      // Infected day = onset - 1, a pure function of symptom_onset.
      const Instant day = *s.symptom_onset - kSecondsPerDay;
      if (!day_eligible(s, day)) {
        if (diagnostics)
          diagnostics->push_back({Diagnostic::Kind::NoEligibleDay, "", 0,
                                  "subject " + s.subject_id +
                                      ": onset-1 day fails the coverage gate",
                                  false});
        continue;
      }
      refs.push_back({s.subject_id, day, DayLabel::Infected});
    } else {
      std::vector<Instant> eligible;
      if (!s.heart_rate.empty()) {
        const Instant first = day_start(s.heart_rate.front().first);
        const Instant last = day_start(s.heart_rate.back().first);
        for (Instant d = first; d <= last; d += kSecondsPerDay)
          if (day_eligible(s, d)) eligible.push_back(d);
      }
      if (eligible.empty()) {
        if (diagnostics)
          diagnostics->push_back({Diagnostic::Kind::NoEligibleDay, "", 0,
                                  "subject " + s.subject_id +
                                      ": no day passes the coverage gate",
                                  false});
        continue;
      }
      // Per-subject stream keyed by id so subject order cannot matter.
      Rng rng(derive_seed(rng_seed, "healthy-day:" + s.subject_id));
      std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
      refs.push_back({s.subject_id, eligible[pick(rng)], DayLabel::Healthy});
    }
  }
  return refs;
}

namespace {

std::string serialize_samples(
    const std::vector<SubjectStream>& streams, const std::string& value_col,
    std::vector<std::pair<Instant, double>> SubjectStream::*member,
    bool integral) {
  std::ostringstream out;
  out << "subject_id,timestamp," << value_col << "\n";
  for (const auto& s : streams)
    for (const auto& [t, v] : s.*member) {
      out << s.subject_id << "," << format_iso8601(t) << ",";
      if (integral)
        out << static_cast<long long>(std::llround(v));
      else
        out << csv::format_double(v);
      out << "\n";
    }
  return out.str();
}

}  // namespace

std::string serialize_streams_hr(const std::vector<SubjectStream>& streams) {
  return serialize_samples(streams, "bpm", &SubjectStream::heart_rate, false);
}

std::string serialize_streams_steps(const std::vector<SubjectStream>& streams) {
  return serialize_samples(streams, "steps", &SubjectStream::steps, true);
}

std::string serialize_streams_labels(const std::vector<SubjectStream>& streams) {
  std::ostringstream out;
  out << "subject_id,status,symptom_onset\n";
  for (const auto& s : streams) {
    out << s.subject_id << ","
        << (s.status == HealthStatus::CovidPositive ? "covid" : "healthy")
        << ",";
    if (s.symptom_onset) out << format_date(*s.symptom_onset);
    out << "\n";
  }
  return out.str();
}

}  // namespace covidrhythm
