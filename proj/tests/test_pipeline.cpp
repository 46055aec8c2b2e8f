#include <set>
#include <string>
#include <vector>

#include "covidrhythm/pipeline.hpp"
#include "doctest.h"

using namespace covidrhythm;

namespace {

// A fast pipeline config for small cohorts: tiny network, few epochs.
PipelineConfig fast_config() {
  PipelineConfig cfg;
  cfg.net.gru_hidden = 16;
  cfg.net.heads = 2;
  cfg.net.rhythm_fc = 8;
  cfg.net.joint_fc = 8;
  cfg.net.dropout = 0.1;
  cfg.train.max_epochs = 5;
  cfg.train.patience = 3;
  cfg.folds = 3;
  cfg.k_sensor = 4;
  cfg.k_rhythm = 4;
  cfg.seed = 5;
  return cfg;
}

std::vector<SampleRecord> small_cohort_samples(const PipelineConfig& cfg) {
  CohortSpec spec;
  spec.n_healthy = 9;
  spec.n_infected = 6;
  spec.days_per_subject = 3;
  spec.seed = 13;
  const auto cohort = generate(spec);
  const auto refs = select_labeled_days(cohort.streams, spec.seed);
  return build_samples(cohort.streams, refs, cfg);
}

}  // namespace

TEST_CASE("rhythm feature names enumerate feature x period x parameter") {
  RhythmConfig rc;
  rc.periods_hours = {24.0, 48.0};
  const auto names = rhythm_feature_names(rc);
  CHECK(names.size() == 39u * 2u * 9u);
  CHECK(names[0] == "rhr.mean.mesor.24h");
  // period suffix present everywhere
  int h24 = 0, h48 = 0;
  for (const auto& n : names) {
    if (n.find(".24h") != std::string::npos) ++h24;
    if (n.find(".48h") != std::string::npos) ++h48;
  }
  CHECK(h24 == 39 * 9);
  CHECK(h48 == 39 * 9);
}

TEST_CASE("build_sample produces the spec shapes") {
  const auto cfg = fast_config();
  const auto samples = small_cohort_samples(cfg);
  REQUIRE(samples.size() == 15);
  int infected = 0;
  for (const auto& s : samples) {
    CHECK(s.sensor.window_count() == 47);  // 60-minute windows, 50% overlap
    CHECK(s.sensor.rows[0].size() == 39);
    CHECK(s.rhythm_values.size() == 39u * 9u);
    infected += s.label;
  }
  CHECK(infected == 6);
}

TEST_CASE("config json round-trips and rejects unknown keys") {
  auto cfg = fast_config();
  cfg.paper_top10 = true;
  cfg.branches = BranchMode::RhythmOnly;
  cfg.rhythm.periods_hours = {24.0, 48.0};
  const auto text = cfg.to_json();
  const auto back = PipelineConfig::from_json(text);
  CHECK(back.net.gru_hidden == 16);
  CHECK(back.paper_top10);
  CHECK(back.branches == BranchMode::RhythmOnly);
  CHECK(back.rhythm.periods_hours == cfg.rhythm.periods_hours);
  CHECK(back.seed == cfg.seed);
  CHECK(back.to_json() == text);

  auto bad = text;
  bad.insert(bad.find_last_of('}'), ",\"trhesold\": 0.5");
  CHECK_THROWS_AS(PipelineConfig::from_json(bad), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_json("{"), ParseError);
}

TEST_CASE("cross validation covers every subject exactly once") {
  const auto cfg = fast_config();
  const auto samples = small_cohort_samples(cfg);
  const auto report = cross_validate(samples, cfg);
  REQUIRE(report.folds.size() == 3);
  std::set<std::string> seen;
  int total = 0;
  for (const auto& f : report.folds) {
    CHECK(f.sensor_features.size() == 4);
    CHECK(f.rhythm_features.size() == 4);
    CHECK(f.test_labels.size() == f.test_scores.size());
    CHECK(f.weights_hash != 0);
    for (const auto& id : f.test_subjects) seen.insert(id);
    total += static_cast<int>(f.test_subjects.size());
  }
  CHECK(total == 15);
  CHECK(seen.size() == 15);
  // scores are probabilities
  for (const auto& f : report.folds)
    for (double s : f.test_scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
}

TEST_CASE("cross validation is deterministic per seed") {
  const auto cfg = fast_config();
  const auto samples = small_cohort_samples(cfg);
  const auto a = cross_validate(samples, cfg);
  const auto b = cross_validate(samples, cfg);
  REQUIRE(a.folds.size() == b.folds.size());
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    CHECK(a.folds[f].weights_hash == b.folds[f].weights_hash);
    CHECK(a.folds[f].test_scores == b.folds[f].test_scores);
  }
  CHECK(a.to_json(cfg) == b.to_json(cfg));
}

TEST_CASE("paper preset uses the pinned lists in every fold") {
  auto cfg = fast_config();
  cfg.paper_top10 = true;
  cfg.net.gru_hidden = 16;
  const auto samples = small_cohort_samples(cfg);
  const auto report = cross_validate(samples, cfg);
  for (const auto& f : report.folds) {
    CHECK(f.sensor_features == paper_top10_sensor());
    CHECK(f.rhythm_features == paper_top10_rhythm(24.0));
  }
}

TEST_CASE("branch modes drop the other branch") {
  auto cfg = fast_config();
  cfg.branches = BranchMode::SensorOnly;
  const auto samples = small_cohort_samples(cfg);
  auto report = cross_validate(samples, cfg);
  for (const auto& f : report.folds) CHECK(f.rhythm_features.empty());
  cfg.branches = BranchMode::RhythmOnly;
  report = cross_validate(samples, cfg);
  for (const auto& f : report.folds) CHECK(f.sensor_features.empty());
}

TEST_CASE("bundle round-trips and scores consistently") {
  const auto cfg = fast_config();
  const auto samples = small_cohort_samples(cfg);
  const auto bundle = train_bundle(samples, cfg);
  const auto restored = ModelBundle::from_json(bundle.to_json());
  for (const auto& s : samples) {
    const double p1 = bundle.score(s);
    const double p2 = restored.score(s);
    CHECK(p1 == p2);
    CHECK(p1 >= 0.0);
    CHECK(p1 <= 1.0);
  }
  CHECK(hash_params(bundle.params) == hash_params(restored.params));
}

TEST_CASE("csv artifact helpers emit headers") {
  const auto cfg = fast_config();
  const auto samples = small_cohort_samples(cfg);
  const auto text = features_csv(samples[0].sensor);
  CHECK(text.rfind("window_start_minute,", 0) == 0);
  CHECK(text.find("rhr.mean") != std::string::npos);
  const auto rtext =
      rhythms_csv(rhythm_feature_names(cfg.rhythm), samples[0].rhythm_values);
  CHECK(rtext.find("rhr.mean.mesor.24h") != std::string::npos);
}
