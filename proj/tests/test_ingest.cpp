#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "covidrhythm/ingest.hpp"
#include "doctest.h"

using namespace covidrhythm;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ingest_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) {
    const auto p = path / name;
    std::ofstream out(p);
    out << text;
    return p.string();
  }
  static int counter;
};
int TempDir::counter = 0;

// A dense day of data for one subject starting at the given date.
std::string dense_hr(const std::string& id, const std::string& date) {
  std::string out;
  for (int m = 0; m < 1440; ++m) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s,%sT%02d:%02d:00Z,%d\n", id.c_str(),
                  date.c_str(), m / 60, m % 60, 60 + m % 20);
    out += buf;
  }
  return out;
}

}  // namespace

TEST_CASE("parses the three-file contract and sorts subjects") {
  TempDir dir;
  const auto hr = dir.write("heart_rate.csv",
                            "subject_id,timestamp,bpm\n"
                            "s2,2024-01-01T00:00:00Z,70\n"
                            "s1,2024-01-01T00:00:00Z,65\n"
                            "s1,2024-01-01T00:01:00Z,66\n");
  const auto steps = dir.write("steps.csv",
                               "subject_id,timestamp,steps\n"
                               "s1,2024-01-01T00:00:00Z,0\n"
                               "s2,2024-01-01T00:00:00Z,12\n");
  const auto labels = dir.write("labels.csv",
                                "subject_id,status,symptom_onset\n"
                                "s1,healthy,\n"
                                "s2,covid,2024-01-03\n");
  const auto res = parse_streams(hr, steps, labels);
  REQUIRE(res.streams.size() == 2);
  CHECK(res.streams[0].subject_id == "s1");
  CHECK(res.streams[1].subject_id == "s2");
  CHECK(res.streams[0].heart_rate.size() == 2);
  CHECK(res.streams[0].status == HealthStatus::Healthy);
  CHECK(res.streams[1].status == HealthStatus::CovidPositive);
  REQUIRE(res.streams[1].symptom_onset.has_value());
  for (const auto& d : res.diagnostics) CHECK(!d.is_error);
}

TEST_CASE("bad rows become diagnostics, not failures") {
  TempDir dir;
  const auto hr = dir.write("heart_rate.csv",
                            "subject_id,timestamp,bpm\n"
                            "s1,2024-01-01T00:00:00Z,65\n"
                            "s1,not-a-timestamp,66\n"
                            "s1,2024-01-01T00:02:00Z,999\n"
                            "s1,2024-01-01T00:03:00Z,70\n");
  const auto steps = dir.write("steps.csv",
                               "subject_id,timestamp,steps\n"
                               "s1,2024-01-01T00:00:00Z,-4\n");
  const auto labels = dir.write("labels.csv",
                                "subject_id,status,symptom_onset\n"
                                "s1,healthy,\n"
                                "s9,sick,\n");
  const auto res = parse_streams(hr, steps, labels);
  REQUIRE(res.streams.size() == 1);
  CHECK(res.streams[0].heart_rate.size() == 2);  // rows 2 and 3 dropped
  CHECK(res.streams[0].steps.empty());
  int row_errors = 0;
  for (const auto& d : res.diagnostics)
    if (d.kind == Diagnostic::Kind::UnparseableRow) ++row_errors;
  CHECK(row_errors == 4);  // bad ts, bad bpm, bad steps, bad status
}

TEST_CASE("duplicate timestamps warn and keep the later row") {
  TempDir dir;
  const auto hr = dir.write("heart_rate.csv",
                            "subject_id,timestamp,bpm\n"
                            "s1,2024-01-01T00:00:00Z,65\n"
                            "s1,2024-01-01T00:00:00Z,72\n");
  const auto steps = dir.write("steps.csv", "subject_id,timestamp,steps\n");
  const auto labels = dir.write("labels.csv",
                                "subject_id,status,symptom_onset\n"
                                "s1,healthy,\n");
  const auto res = parse_streams(hr, steps, labels);
  REQUIRE(res.streams.size() == 1);
  REQUIRE(res.streams[0].heart_rate.size() == 1);
  CHECK(res.streams[0].heart_rate[0].second == 72.0);
  bool warned = false;
  for (const auto& d : res.diagnostics)
    if (d.kind == Diagnostic::Kind::DuplicateTimestamp) {
      warned = true;
      CHECK(!d.is_error);
    }
  CHECK(warned);
}

TEST_CASE("covid status without onset is an error diagnostic") {
  TempDir dir;
  const auto hr = dir.write("heart_rate.csv", "subject_id,timestamp,bpm\n");
  const auto steps = dir.write("steps.csv", "subject_id,timestamp,steps\n");
  const auto labels = dir.write("labels.csv",
                                "subject_id,status,symptom_onset\n"
                                "s1,covid,\n");
  const auto res = parse_streams(hr, steps, labels);
  bool flagged = false;
  for (const auto& d : res.diagnostics)
    if (d.kind == Diagnostic::Kind::InfectedWithoutOnset && d.is_error)
      flagged = true;
  CHECK(flagged);
}

TEST_CASE("empty files parse to an empty result") {
  TempDir dir;
  const auto hr = dir.write("heart_rate.csv", "");
  const auto steps = dir.write("steps.csv", "");
  const auto labels = dir.write("labels.csv", "");
  const auto res = parse_streams(hr, steps, labels);
  CHECK(res.streams.empty());
}

TEST_CASE("minute resampling: last heart-rate sample wins, steps accumulate") {
  SubjectStream s;
  s.subject_id = "x";
  // two HR samples within minute 0, two step samples within minute 1
  s.heart_rate = {{10, 64.0}, {50, 68.0}, {90, 70.0}};
  s.steps = {{60, 5.0}, {100, 7.0}};
  const auto g = resample_day(s, 0);
  REQUIRE(g.hr.size() == 1440);
  REQUIRE(g.steps.size() == 1440);
  CHECK(g.hr[0] == 68.0);
  CHECK(g.hr[1] == 70.0);
  CHECK(!g.hr[2].has_value());
  CHECK(g.steps[1] == 12.0);
  CHECK(!g.steps[0].has_value());
  // samples outside the day are ignored
  s.heart_rate.push_back({86400 + 30, 99.0});
  const auto g2 = resample_day(s, 0);
  CHECK(g2.hr[0] == 68.0);
}

TEST_CASE("labeled day selection pins infected subjects to onset minus one") {
  TempDir dir;
  std::string hr_text = "subject_id,timestamp,bpm\n";
  hr_text += dense_hr("c1", "2024-01-01");
  hr_text += dense_hr("c1", "2024-01-02");
  hr_text += dense_hr("c1", "2024-01-03");
  hr_text += dense_hr("h1", "2024-01-01");
  hr_text += dense_hr("h1", "2024-01-02");
  const auto hr = dir.write("heart_rate.csv", hr_text);
  const auto steps = dir.write("steps.csv", "subject_id,timestamp,steps\n");
  const auto labels = dir.write("labels.csv",
                                "subject_id,status,symptom_onset\n"
                                "c1,covid,2024-01-03\n"
                                "h1,healthy,\n");
  const auto res = parse_streams(hr, steps, labels);
  REQUIRE(res.streams.size() == 2);

  const auto days = select_labeled_days(res.streams, 5);
  REQUIRE(days.size() == 2);
  const auto& infected =
      days[0].subject_id == "c1" ? days[0] : days[1];
  const auto& healthy = days[0].subject_id == "h1" ? days[0] : days[1];
  CHECK(infected.label == DayLabel::Infected);
  CHECK(format_iso8601(infected.day_start).substr(0, 10) == "2024-01-02");
  CHECK(healthy.label == DayLabel::Healthy);

  // healthy-day choice is deterministic per seed and independent of the
  // other subjects in the set
  const auto again = select_labeled_days(res.streams, 5);
  CHECK(again[0].day_start == days[0].day_start);
  CHECK(again[1].day_start == days[1].day_start);
  std::vector<SubjectStream> healthy_only = {
      res.streams[0].subject_id == "h1" ? res.streams[0] : res.streams[1]};
  const auto solo = select_labeled_days(healthy_only, 5);
  REQUIRE(solo.size() == 1);
  CHECK(solo[0].day_start == healthy.day_start);
}

TEST_CASE("subjects without an eligible day are dropped with a diagnostic") {
  SubjectStream sparse;
  sparse.subject_id = "s";
  // only 100 minutes of data: fails the 10% missing gate everywhere
  for (int m = 0; m < 100; ++m)
    sparse.heart_rate.push_back({m * 60, 70.0});
  std::vector<Diagnostic> diags;
  const auto days = select_labeled_days({sparse}, 1, &diags);
  CHECK(days.empty());
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].kind == Diagnostic::Kind::NoEligibleDay);
}

TEST_CASE("serialize/parse round-trip preserves streams") {
  SubjectStream a;
  a.subject_id = "a1";
  a.status = HealthStatus::CovidPositive;
  a.symptom_onset = parse_date("2024-02-10");
  for (int m = 0; m < 10; ++m) {
    a.heart_rate.push_back({m * 60, 60.0 + m});
    a.steps.push_back({m * 60, m % 3 == 0 ? 15.0 : 0.0});
  }
  SubjectStream b;
  b.subject_id = "b2";
  b.heart_rate = {{3600, 71.5}};

  TempDir dir;
  const std::vector<SubjectStream> streams = {a, b};
  const auto hr = dir.write("hr.csv", serialize_streams_hr(streams));
  const auto st = dir.write("st.csv", serialize_streams_steps(streams));
  const auto lb = dir.write("lb.csv", serialize_streams_labels(streams));
  const auto res = parse_streams(hr, st, lb);
  REQUIRE(res.streams.size() == 2);
  CHECK(res.streams[0].heart_rate == a.heart_rate);
  CHECK(res.streams[0].steps == a.steps);
  CHECK(res.streams[0].symptom_onset == a.symptom_onset);
  CHECK(res.streams[1].heart_rate == b.heart_rate);
  for (const auto& d : res.diagnostics) CHECK(!d.is_error);
}
