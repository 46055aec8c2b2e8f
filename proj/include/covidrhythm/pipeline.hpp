#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covidrhythm/eval.hpp"
#include "covidrhythm/feature_select.hpp"
#include "covidrhythm/ingest.hpp"
#include "covidrhythm/model.hpp"
#include "covidrhythm/rhythm.hpp"
#include "covidrhythm/sensor_features.hpp"
#include "covidrhythm/synth.hpp"

namespace covidrhythm {

enum class BranchMode { Both, SensorOnly, RhythmOnly };

struct PipelineConfig {
  PreprocessConfig preprocess;  // SMA length + window spec
  RhythmConfig rhythm;          // periods, components, MSE settings
  int mi_bins = 10;
  int k_sensor = 10;
  int k_rhythm = 10;
  bool paper_top10 = false;   // pinned feature lists instead of MI ranking
  bool global_ranking = false;  // rank on all samples instead of per fold
  int subsequence_length = 0;   // 0 = full window sequence
  BranchMode branches = BranchMode::Both;
  NetworkConfig net;   // seq/sensor/rhythm dims are filled per run
  TrainConfig train;
  int folds = 5;
  double val_fraction = 0.2;
  double threshold = 0.5;
  double beta = 0.1;
  std::uint64_t seed = 7;

  std::string to_json() const;
  // Unknown keys anywhere in the document are rejected.
  static PipelineConfig from_json(const std::string& text);
};

// One labeled 24h record carried through featurization.
struct SampleRecord {
  std::string subject_id;
  Instant day_start = 0;
  int label = 0;  // 1 = infected
  WindowFeatureMatrix sensor;        // windows x 39
  std::vector<double> rhythm_values;  // rhythm_feature_names() order
};

// All rhythm column names for a config: feature-major, then period, then
// the nine parameters (39 * 9 * periods entries).
std::vector<std::string> rhythm_feature_names(const RhythmConfig& cfg);

SampleRecord build_sample(const SubjectStream& stream, const LabeledDayRef& ref,
                          const PipelineConfig& cfg);

// Featurizes an already-preprocessed day (the re-runnable entry point used
// by the CLI on preprocess artifacts).
SampleRecord build_sample(const DaySeries& day, const std::string& subject_id,
                          Instant day_start, int label,
                          const PipelineConfig& cfg);

// Full MI rankings over all samples; mirrors the columns cross_validate
// ranks on (window-mean sensor scalars, raw rhythm values).
FeatureRanking rank_sensor_features(const std::vector<SampleRecord>& samples,
                                    const PipelineConfig& cfg);
FeatureRanking rank_rhythm_features(const std::vector<SampleRecord>& samples,
                                    const PipelineConfig& cfg);

std::vector<SampleRecord> build_samples(const std::vector<SubjectStream>& streams,
                                        const std::vector<LabeledDayRef>& refs,
                                        const PipelineConfig& cfg);

struct FoldOutcome {
  MetricReport report;
  std::vector<std::string> test_subjects;
  std::vector<int> test_labels;
  std::vector<double> test_scores;
  std::vector<std::string> sensor_features;
  std::vector<std::string> rhythm_features;
  std::uint64_t weights_hash = 0;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

struct CvReport {
  std::vector<FoldOutcome> folds;
  MetricReport mean;
  MetricReport stddev;
  std::string to_json(const PipelineConfig& cfg) const;
};

// Subject-wise stratified 5-fold CV: per fold, MI selection, replication
// balancing, and standardization statistics all come from the training
// split alone.
CvReport cross_validate(const std::vector<SampleRecord>& samples,
                        const PipelineConfig& cfg);

// Stable content hash of a parameter set (used by the leakage canary).
std::uint64_t hash_params(const ModelParams& params);

// Everything needed to score a new day record.
struct ModelBundle {
  ModelParams params;
  std::vector<std::string> sensor_features;
  std::vector<std::string> rhythm_features;
  Standardizer sensor_std;
  Standardizer rhythm_std;
  PipelineConfig cfg;

  std::string to_json() const;
  static ModelBundle from_json(const std::string& text);
  double score(const SampleRecord& record) const;
};

// Trains on all samples (with a stratified validation split) and packages
// the result.
ModelBundle train_bundle(const std::vector<SampleRecord>& samples,
                         const PipelineConfig& cfg,
                         std::vector<EpochLog>* log = nullptr);

// CSV artifact helpers.
std::string day_series_csv(const DaySeries& day);
std::string features_csv(const WindowFeatureMatrix& m);
std::string rhythms_csv(const std::vector<std::string>& names,
                        const std::vector<double>& values);
std::string ranking_csv(const FeatureRanking& ranking);

}  // namespace covidrhythm
