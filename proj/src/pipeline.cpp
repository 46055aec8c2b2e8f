#include "covidrhythm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "covidrhythm/csv.hpp"
#include "covidrhythm/rng.hpp"
#include "json.hpp"

namespace covidrhythm {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key))
      throw ConfigError("unknown config key '" + key + "' in " + where);
}

std::string period_suffix(double period_hours) {
  return "." + std::to_string(static_cast<int>(std::lround(period_hours))) +
         "h";
}

}  // namespace

std::string PipelineConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["folds"] = folds;
  j["val_fraction"] = val_fraction;
  j["threshold"] = threshold;
  j["beta"] = beta;
  j["mi_bins"] = mi_bins;
  j["k_sensor"] = k_sensor;
  j["k_rhythm"] = k_rhythm;
  j["features"] = paper_top10 ? "paper-top10" : "mi";
  j["global_ranking"] = global_ranking;
  j["subsequence_length"] = subsequence_length;
  j["branches"] = branches == BranchMode::Both
                      ? "both"
                      : (branches == BranchMode::SensorOnly ? "sensor-only"
                                                            : "rhythm-only");
  j["preprocess"] = {{"sma_minutes", preprocess.sma_minutes},
                     {"window_minutes", preprocess.window.width_minutes},
                     {"overlap", preprocess.window.overlap_fraction}};
  j["rhythm"] = {{"periods_hours", rhythm.periods_hours},
                 {"components", rhythm.components},
                 {"mse_m", rhythm.mse.template_length},
                 {"mse_r", rhythm.mse.tolerance_factor},
                 {"mse_scales", rhythm.mse.scales}};
  j["network"] = {{"gru_hidden", net.gru_hidden},
                  {"heads", net.heads},
                  {"rhythm_fc", net.rhythm_fc},
                  {"joint_fc", net.joint_fc},
                  {"dropout", net.dropout},
                  {"mean_pool", net.mean_pool},
                  {"rhythm_relu", net.rhythm_relu}};
  j["training"] = {{"batch_size", train.batch_size},
                   {"lr0", train.lr0},
                   {"lr_decay", train.lr_decay},
                   {"rho", train.rho},
                   {"eps", train.eps},
                   {"max_epochs", train.max_epochs},
                   {"patience", train.patience}};
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed config json");
  reject_unknown_keys(j,
                      {"seed", "folds", "val_fraction", "threshold", "beta",
                       "mi_bins", "k_sensor", "k_rhythm", "features",
                       "global_ranking", "subsequence_length", "branches",
                       "preprocess", "rhythm", "network", "training"},
                      "config root");
  PipelineConfig c;
  c.seed = j.value("seed", c.seed);
  c.folds = j.value("folds", c.folds);
  c.val_fraction = j.value("val_fraction", c.val_fraction);
  c.threshold = j.value("threshold", c.threshold);
  c.beta = j.value("beta", c.beta);
  c.mi_bins = j.value("mi_bins", c.mi_bins);
  c.k_sensor = j.value("k_sensor", c.k_sensor);
  c.k_rhythm = j.value("k_rhythm", c.k_rhythm);
  if (j.contains("features")) {
    const std::string f = j["features"];
    if (f == "paper-top10")
      c.paper_top10 = true;
    else if (f == "mi")
      c.paper_top10 = false;
    else
      throw ConfigError("features must be 'mi' or 'paper-top10'");
  }
  c.global_ranking = j.value("global_ranking", c.global_ranking);
  c.subsequence_length = j.value("subsequence_length", c.subsequence_length);
  if (j.contains("branches")) {
    const std::string b = j["branches"];
    if (b == "both")
      c.branches = BranchMode::Both;
    else if (b == "sensor-only")
      c.branches = BranchMode::SensorOnly;
    else if (b == "rhythm-only")
      c.branches = BranchMode::RhythmOnly;
    else
      throw ConfigError("branches must be both|sensor-only|rhythm-only");
  }
  if (j.contains("preprocess")) {
    const json& p = j["preprocess"];
    reject_unknown_keys(p, {"sma_minutes", "window_minutes", "overlap"},
                        "preprocess");
    c.preprocess.sma_minutes = p.value("sma_minutes", c.preprocess.sma_minutes);
    c.preprocess.window.width_minutes =
        p.value("window_minutes", c.preprocess.window.width_minutes);
    c.preprocess.window.overlap_fraction =
        p.value("overlap", c.preprocess.window.overlap_fraction);
  }
  if (j.contains("rhythm")) {
    const json& r = j["rhythm"];
    reject_unknown_keys(r, {"periods_hours", "components", "mse_m", "mse_r",
                            "mse_scales"},
                        "rhythm");
    if (r.contains("periods_hours"))
      c.rhythm.periods_hours = r["periods_hours"].get<std::vector<double>>();
    c.rhythm.components = r.value("components", c.rhythm.components);
    c.rhythm.mse.template_length = r.value("mse_m", c.rhythm.mse.template_length);
    c.rhythm.mse.tolerance_factor =
        r.value("mse_r", c.rhythm.mse.tolerance_factor);
    if (r.contains("mse_scales"))
      c.rhythm.mse.scales = r["mse_scales"].get<std::vector<int>>();
  }
  if (j.contains("network")) {
    const json& n = j["network"];
    reject_unknown_keys(n,
                        {"gru_hidden", "heads", "rhythm_fc", "joint_fc",
                         "dropout", "mean_pool", "rhythm_relu"},
                        "network");
    c.net.gru_hidden = n.value("gru_hidden", c.net.gru_hidden);
    c.net.heads = n.value("heads", c.net.heads);
    c.net.rhythm_fc = n.value("rhythm_fc", c.net.rhythm_fc);
    c.net.joint_fc = n.value("joint_fc", c.net.joint_fc);
    c.net.dropout = n.value("dropout", c.net.dropout);
    c.net.mean_pool = n.value("mean_pool", c.net.mean_pool);
    c.net.rhythm_relu = n.value("rhythm_relu", c.net.rhythm_relu);
  }
  if (j.contains("training")) {
    const json& t = j["training"];
    reject_unknown_keys(t,
                        {"batch_size", "lr0", "lr_decay", "rho", "eps",
                         "max_epochs", "patience"},
                        "training");
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.lr0 = t.value("lr0", c.train.lr0);
    c.train.lr_decay = t.value("lr_decay", c.train.lr_decay);
    c.train.rho = t.value("rho", c.train.rho);
    c.train.eps = t.value("eps", c.train.eps);
    c.train.max_epochs = t.value("max_epochs", c.train.max_epochs);
    c.train.patience = t.value("patience", c.train.patience);
  }
  return c;
}

std::vector<std::string> rhythm_feature_names(const RhythmConfig& cfg) {
  std::vector<std::string> out;
  out.reserve(sensor_feature_names().size() * cfg.periods_hours.size() *
              kRhythmParamCount);
  for (const auto& feature : sensor_feature_names())
    for (double period : cfg.periods_hours)
      for (const auto& param : rhythm_param_names())
        out.push_back(feature + "." + param + period_suffix(period));
  return out;
}

SampleRecord build_sample(const SubjectStream& stream, const LabeledDayRef& ref,
                          const PipelineConfig& cfg) {
  const MinuteGrids grids = resample_day(stream, ref.day_start);
  const DaySeries day = build_day_series(grids.hr, grids.steps, cfg.preprocess);
  return build_sample(day, ref.subject_id, ref.day_start,
                      ref.label == DayLabel::Infected ? 1 : 0, cfg);
}

SampleRecord build_sample(const DaySeries& day, const std::string& subject_id,
                          Instant day_start, int label,
                          const PipelineConfig& cfg) {
  const std::vector<Window> windows = segment(day, cfg.preprocess.window);

  SampleRecord rec;
  rec.subject_id = subject_id;
  rec.day_start = day_start;
  rec.label = label;
  rec.sensor = extract_features(windows);

  std::vector<double> times;
  times.reserve(windows.size());
  for (const auto& w : windows) times.push_back(w.start_minute / 60.0);

  for (int f = 0; f < kSensorFeatureCount; ++f) {
    const std::vector<double> series = rec.sensor.column(f);
    for (double period : cfg.rhythm.periods_hours) {
      const RhythmVector rv = rhythm_vector(times, series, period, cfg.rhythm);
      for (double v : rv.values) rec.rhythm_values.push_back(v);
    }
  }
  return rec;
}

std::vector<SampleRecord> build_samples(const std::vector<SubjectStream>& streams,
                                        const std::vector<LabeledDayRef>& refs,
                                        const PipelineConfig& cfg) {
  std::map<std::string, const SubjectStream*> by_id;
  for (const auto& s : streams) by_id[s.subject_id] = &s;
  std::vector<SampleRecord> out;
  out.reserve(refs.size());
  for (const auto& ref : refs) {
    auto it = by_id.find(ref.subject_id);
    if (it == by_id.end())
      throw DataError("labeled day for unknown subject " + ref.subject_id);
    out.push_back(build_sample(*it->second, ref, cfg));
  }
  return out;
}

namespace {

std::size_t feature_index(const std::vector<std::string>& names,
                          const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown feature '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// Scalar view of a windowed sensor feature for MI ranking: the mean over
// windows.
double sensor_scalar(const SampleRecord& rec, int feature) {
  const auto col = rec.sensor.column(feature);
  return std::accumulate(col.begin(), col.end(), 0.0) / col.size();
}

struct Selection {
  std::vector<std::string> sensor;
  std::vector<std::string> rhythm;
};

Selection select_features(const std::vector<SampleRecord>& samples,
                          const std::vector<std::size_t>& idx,
                          const PipelineConfig& cfg) {
  Selection sel;
  if (cfg.paper_top10) {
    sel.sensor = paper_top10_sensor();
    sel.rhythm = paper_top10_rhythm(cfg.rhythm.periods_hours.front());
  } else {
    std::vector<int> labels;
    for (std::size_t i : idx) labels.push_back(samples[i].label);

    std::vector<std::vector<double>> sensor_cols(kSensorFeatureCount);
    for (int f = 0; f < kSensorFeatureCount; ++f)
      for (std::size_t i : idx)
        sensor_cols[f].push_back(sensor_scalar(samples[i], f));
    const FeatureRanking sr = select_top_k(sensor_cols, sensor_feature_names(),
                                           labels, cfg.k_sensor, cfg.mi_bins);
    sel.sensor = sr.selected_names();

    const auto rnames = rhythm_feature_names(cfg.rhythm);
    std::vector<std::vector<double>> rhythm_cols(rnames.size());
    for (std::size_t f = 0; f < rnames.size(); ++f)
      for (std::size_t i : idx)
        rhythm_cols[f].push_back(samples[i].rhythm_values[f]);
    const FeatureRanking rr =
        select_top_k(rhythm_cols, rnames, labels, cfg.k_rhythm, cfg.mi_bins);
    sel.rhythm = rr.selected_names();
  }
  if (cfg.branches == BranchMode::SensorOnly) sel.rhythm.clear();
  if (cfg.branches == BranchMode::RhythmOnly) sel.sensor.clear();
  return sel;
}

// Assembles an (unstandardized) model sample with the selected columns and
// optional truncation to the most recent L windows.
Sample assemble(const SampleRecord& rec, const Selection& sel,
                const PipelineConfig& cfg,
                const std::vector<std::string>& rhythm_names) {
  Sample s;
  s.label = rec.label;
  const int W = static_cast<int>(rec.sensor.window_count());
  int L = cfg.subsequence_length > 0 ? std::min(cfg.subsequence_length, W) : W;
  if (!sel.sensor.empty()) {
    s.sensor = Eigen::MatrixXd(L, sel.sensor.size());
    for (std::size_t c = 0; c < sel.sensor.size(); ++c) {
      const std::size_t f = feature_index(sensor_feature_names(), sel.sensor[c]);
      for (int t = 0; t < L; ++t)
        s.sensor(t, c) = rec.sensor.rows[W - L + t][f];
    }
  }
  if (!sel.rhythm.empty()) {
    s.rhythm = Eigen::RowVectorXd(sel.rhythm.size());
    for (std::size_t c = 0; c < sel.rhythm.size(); ++c)
      s.rhythm(c) = rec.rhythm_values[feature_index(rhythm_names, sel.rhythm[c])];
  }
  return s;
}

Standardizer fit_sensor_std(const std::vector<Sample>& train) {
  std::vector<std::vector<double>> rows;
  for (const Sample& s : train)
    for (Eigen::Index t = 0; t < s.sensor.rows(); ++t) {
      std::vector<double> row(s.sensor.cols());
      for (Eigen::Index c = 0; c < s.sensor.cols(); ++c)
        row[c] = s.sensor(t, c);
      rows.push_back(std::move(row));
    }
  return Standardizer::fit(rows);
}

Standardizer fit_rhythm_std(const std::vector<Sample>& train) {
  std::vector<std::vector<double>> rows;
  for (const Sample& s : train) {
    std::vector<double> row(s.rhythm.size());
    for (Eigen::Index c = 0; c < s.rhythm.size(); ++c) row[c] = s.rhythm(c);
    rows.push_back(std::move(row));
  }
  return Standardizer::fit(rows);
}

void apply_std(Sample& s, const Standardizer& sensor_std,
               const Standardizer& rhythm_std) {
  if (s.sensor.size() > 0) {
    for (Eigen::Index t = 0; t < s.sensor.rows(); ++t) {
      std::vector<double> row(s.sensor.cols());
      for (Eigen::Index c = 0; c < s.sensor.cols(); ++c)
        row[c] = s.sensor(t, c);
      sensor_std.apply(row);
      for (Eigen::Index c = 0; c < s.sensor.cols(); ++c)
        s.sensor(t, c) = row[c];
    }
  }
  if (s.rhythm.size() > 0) {
    std::vector<double> row(s.rhythm.size());
    for (Eigen::Index c = 0; c < s.rhythm.size(); ++c) row[c] = s.rhythm(c);
    rhythm_std.apply(row);
    for (Eigen::Index c = 0; c < s.rhythm.size(); ++c) s.rhythm(c) = row[c];
  }
}

// Stratified validation split over an already-balanced training list.
void val_split(const std::vector<Sample>& all, double fraction, Rng& rng,
               std::vector<Sample>& train_out, std::vector<Sample>& val_out) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < all.size(); ++i)
    (all[i].label ? pos : neg).push_back(i);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  auto take = [&](std::vector<std::size_t>& v) {
    std::size_t n = static_cast<std::size_t>(
        std::lround(fraction * static_cast<double>(v.size())));
    n = std::min(std::max<std::size_t>(n, v.size() >= 2 ? 1 : 0), v.size() - 1);
    return n;
  };
  const std::size_t np = take(pos), nn = take(neg);
  std::set<std::size_t> val_idx;
  for (std::size_t i = 0; i < np; ++i) val_idx.insert(pos[i]);
  for (std::size_t i = 0; i < nn; ++i) val_idx.insert(neg[i]);
  for (std::size_t i = 0; i < all.size(); ++i)
    (val_idx.count(i) ? val_out : train_out).push_back(all[i]);
}

NetworkConfig resolve_net(const PipelineConfig& cfg, const Selection& sel,
                          int seq_len) {
  NetworkConfig net = cfg.net;
  net.seq_len = seq_len;
  net.sensor_dim = static_cast<int>(sel.sensor.size());
  net.rhythm_dim = static_cast<int>(sel.rhythm.size());
  return net;
}

json metric_json(const MetricReport& r) {
  json j;
  j["sensitivity"] = r.sensitivity;
  j["specificity"] = r.specificity;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f_beta"] = r.f_beta;
  if (r.auc_roc)
    j["auc_roc"] = *r.auc_roc;
  else
    j["auc_roc"] = nullptr;
  return j;
}

}  // namespace

std::uint64_t hash_params(const ModelParams& params) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const double* data, std::size_t count) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  auto& p = const_cast<ModelParams&>(params);
  for (auto& [name, m] : p.matrices()) mix(m->data(), m->size());
  for (auto& [name, v] : p.vectors()) mix(v->data(), v->size());
  return h;
}

FeatureRanking rank_sensor_features(const std::vector<SampleRecord>& samples,
                                    const PipelineConfig& cfg) {
  if (samples.empty()) throw DataError("no samples to rank");
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  std::vector<std::vector<double>> cols(kSensorFeatureCount);
  for (int f = 0; f < kSensorFeatureCount; ++f)
    for (const auto& s : samples) cols[f].push_back(sensor_scalar(s, f));
  return select_top_k(cols, sensor_feature_names(), labels, cfg.k_sensor,
                      cfg.mi_bins);
}

FeatureRanking rank_rhythm_features(const std::vector<SampleRecord>& samples,
                                    const PipelineConfig& cfg) {
  if (samples.empty()) throw DataError("no samples to rank");
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  const auto names = rhythm_feature_names(cfg.rhythm);
  std::vector<std::vector<double>> cols(names.size());
  for (std::size_t f = 0; f < names.size(); ++f)
    for (const auto& s : samples) cols[f].push_back(s.rhythm_values[f]);
  return select_top_k(cols, names, labels, cfg.k_rhythm, cfg.mi_bins);
}

CvReport cross_validate(const std::vector<SampleRecord>& samples,
                        const PipelineConfig& cfg) {
  if (samples.empty()) throw DataError("no samples to cross-validate");
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  const FoldPlan plan = make_folds(labels, cfg.folds, cfg.seed);
  const auto rhythm_names = rhythm_feature_names(cfg.rhythm);

  std::vector<std::size_t> all_idx(samples.size());
  for (std::size_t i = 0; i < all_idx.size(); ++i) all_idx[i] = i;

  CvReport report;
  for (int fold = 0; fold < cfg.folds; ++fold) {
    const auto& test_idx = plan.test_indices[fold];
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (!std::binary_search(test_idx.begin(), test_idx.end(), i))
        train_idx.push_back(i);

    const Selection sel = select_features(
        samples, cfg.global_ranking ? all_idx : train_idx, cfg);

    std::vector<int> train_labels;
    for (std::size_t i : train_idx) train_labels.push_back(samples[i].label);
    const std::vector<std::size_t> balanced =
        balance_by_replication(train_labels);

    const int W = static_cast<int>(samples.front().sensor.window_count());
    const int L =
        cfg.subsequence_length > 0 ? std::min(cfg.subsequence_length, W) : W;

    std::vector<Sample> train_all;
    for (std::size_t b : balanced)
      train_all.push_back(assemble(samples[train_idx[b]], sel, cfg, rhythm_names));
    std::vector<Sample> test;
    for (std::size_t i : test_idx)
      test.push_back(assemble(samples[i], sel, cfg, rhythm_names));

    Standardizer sensor_std, rhythm_std;
    if (!sel.sensor.empty()) sensor_std = fit_sensor_std(train_all);
    if (!sel.rhythm.empty()) rhythm_std = fit_rhythm_std(train_all);
    for (Sample& s : train_all) apply_std(s, sensor_std, rhythm_std);
    for (Sample& s : test) apply_std(s, sensor_std, rhythm_std);

    Rng split_rng(derive_seed(cfg.seed, "val-split", fold));
    std::vector<Sample> train_set, val_set;
    val_split(train_all, cfg.val_fraction, split_rng, train_set, val_set);

    TrainConfig tc = cfg.train;
    tc.rng_seed = derive_seed(cfg.seed, "train-fold", fold);
    const NetworkConfig net = resolve_net(cfg, sel, L);
    const TrainResult tr = train(train_set, val_set, net, tc);

    FoldOutcome out;
    out.sensor_features = sel.sensor;
    out.rhythm_features = sel.rhythm;
    out.best_epoch = tr.best_epoch;
    out.best_val_loss = tr.best_val_loss;
    out.weights_hash = hash_params(tr.params);
    for (std::size_t k = 0; k < test.size(); ++k) {
      out.test_subjects.push_back(samples[test_idx[k]].subject_id);
      out.test_labels.push_back(test[k].label);
      out.test_scores.push_back(predict_one(tr.params, test[k]));
    }
    out.report = metrics(out.test_labels, out.test_scores, cfg.threshold,
                         cfg.beta);
    report.folds.push_back(std::move(out));
  }

  // mean +/- std over folds (AUC aggregated over folds where defined)
  auto aggregate = [&](auto getter) {
    std::vector<double> vals;
    for (const auto& f : report.folds) {
      const auto v = getter(f.report);
      if (v) vals.push_back(*v);
    }
    double mean = 0.0, sd = 0.0;
    if (!vals.empty()) {
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      for (double v : vals) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / static_cast<double>(vals.size()));
    }
    return std::make_pair(mean, sd);
  };
  auto opt = [](double v) { return std::optional<double>(v); };
  std::tie(report.mean.sensitivity, report.stddev.sensitivity) =
      aggregate([&](const MetricReport& r) { return opt(r.sensitivity); });
  std::tie(report.mean.specificity, report.stddev.specificity) =
      aggregate([&](const MetricReport& r) { return opt(r.specificity); });
  std::tie(report.mean.precision, report.stddev.precision) =
      aggregate([&](const MetricReport& r) { return opt(r.precision); });
  std::tie(report.mean.recall, report.stddev.recall) =
      aggregate([&](const MetricReport& r) { return opt(r.recall); });
  std::tie(report.mean.f_beta, report.stddev.f_beta) =
      aggregate([&](const MetricReport& r) { return opt(r.f_beta); });
  {
    const auto [m, s] =
        aggregate([](const MetricReport& r) { return r.auc_roc; });
    bool any = false;
    for (const auto& f : report.folds) any = any || f.report.auc_roc.has_value();
    if (any) {
      report.mean.auc_roc = m;
      report.stddev.auc_roc = s;
    }
  }
  return report;
}

std::string CvReport::to_json(const PipelineConfig& cfg) const {
  json j;
  j["tool"] = "covidrhythm";
  j["version"] = COVIDRHYTHM_VERSION;
  j["config"] = json::parse(cfg.to_json());
  j["aggregate"] = {{"mean", metric_json(mean)}, {"std", metric_json(stddev)}};
  json fold_arr = json::array();
  for (const auto& f : folds) {
    json fj;
    fj["metrics"] = metric_json(f.report);
    fj["test_subjects"] = f.test_subjects;
    fj["test_labels"] = f.test_labels;
    fj["test_scores"] = f.test_scores;
    fj["sensor_features"] = f.sensor_features;
    fj["rhythm_features"] = f.rhythm_features;
    fj["best_epoch"] = f.best_epoch;
    fj["best_val_loss"] = f.best_val_loss;
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(f.weights_hash));
    fj["weights_hash"] = hex;
    fold_arr.push_back(std::move(fj));
  }
  j["folds"] = std::move(fold_arr);
  return j.dump(2);
}

ModelBundle train_bundle(const std::vector<SampleRecord>& samples,
                         const PipelineConfig& cfg,
                         std::vector<EpochLog>* log) {
  if (samples.empty()) throw DataError("no samples to train on");
  const auto rhythm_names = rhythm_feature_names(cfg.rhythm);
  std::vector<std::size_t> all_idx(samples.size());
  for (std::size_t i = 0; i < all_idx.size(); ++i) all_idx[i] = i;
  const Selection sel = select_features(samples, all_idx, cfg);

  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  const std::vector<std::size_t> balanced = balance_by_replication(labels);

  const int W = static_cast<int>(samples.front().sensor.window_count());
  const int L =
      cfg.subsequence_length > 0 ? std::min(cfg.subsequence_length, W) : W;

  std::vector<Sample> all;
  for (std::size_t b : balanced)
    all.push_back(assemble(samples[b], sel, cfg, rhythm_names));

  ModelBundle bundle;
  if (!sel.sensor.empty()) bundle.sensor_std = fit_sensor_std(all);
  if (!sel.rhythm.empty()) bundle.rhythm_std = fit_rhythm_std(all);
  for (Sample& s : all) apply_std(s, bundle.sensor_std, bundle.rhythm_std);

  Rng split_rng(derive_seed(cfg.seed, "val-split-final"));
  std::vector<Sample> train_set, val_set;
  val_split(all, cfg.val_fraction, split_rng, train_set, val_set);

  TrainConfig tc = cfg.train;
  tc.rng_seed = derive_seed(cfg.seed, "train-final");
  const TrainResult tr = train(train_set, val_set, resolve_net(cfg, sel, L), tc);

  bundle.params = tr.params;
  bundle.sensor_features = sel.sensor;
  bundle.rhythm_features = sel.rhythm;
  bundle.cfg = cfg;
  if (log) *log = tr.log;
  return bundle;
}

double ModelBundle::score(const SampleRecord& record) const {
  Selection sel{sensor_features, rhythm_features};
  Sample s = assemble(record, sel, cfg, rhythm_feature_names(cfg.rhythm));
  apply_std(s, sensor_std, rhythm_std);
  return predict_one(params, s);
}

std::string ModelBundle::to_json() const {
  json j;
  j["format"] = "covidrhythm-bundle-v1";
  j["model"] = json::parse(params.to_json(cfg.seed));
  j["sensor_features"] = sensor_features;
  j["rhythm_features"] = rhythm_features;
  j["sensor_std"] = {{"mean", sensor_std.mean}, {"std", sensor_std.std}};
  j["rhythm_std"] = {{"mean", rhythm_std.mean}, {"std", rhythm_std.std}};
  j["pipeline"] = json::parse(cfg.to_json());
  return j.dump(2);
}

ModelBundle ModelBundle::from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed bundle json");
  if (j.value("format", "") != "covidrhythm-bundle-v1")
    throw ParseError("unrecognized bundle format");
  ModelBundle b;
  b.params = ModelParams::from_json(j.at("model").dump());
  b.sensor_features = j.at("sensor_features").get<std::vector<std::string>>();
  b.rhythm_features = j.at("rhythm_features").get<std::vector<std::string>>();
  b.sensor_std.mean = j.at("sensor_std").at("mean").get<std::vector<double>>();
  b.sensor_std.std = j.at("sensor_std").at("std").get<std::vector<double>>();
  b.rhythm_std.mean = j.at("rhythm_std").at("mean").get<std::vector<double>>();
  b.rhythm_std.std = j.at("rhythm_std").at("std").get<std::vector<double>>();
  b.cfg = PipelineConfig::from_json(j.at("pipeline").dump());
  return b;
}

std::string day_series_csv(const DaySeries& day) {
  std::ostringstream out;
  out << "minute,rhr,steps,provenance\n";
  for (int m = 0; m < kMinutesPerDay; ++m) {
    out << m << "," << csv::format_double(day.rhr[m]) << ","
        << csv::format_double(day.steps[m]) << ","
        << (day.provenance[m] == Provenance::Observed ? "observed"
                                                      : "interpolated")
        << "\n";
  }
  return out.str();
}

std::string features_csv(const WindowFeatureMatrix& m) {
  std::ostringstream out;
  const auto& names = sensor_feature_names();
  out << "window_start_minute";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    out << m.window_start_minutes[r];
    for (double v : m.rows[r]) out << "," << csv::format_double(v);
    out << "\n";
  }
  return out.str();
}

std::string rhythms_csv(const std::vector<std::string>& names,
                        const std::vector<double>& values) {
  if (names.size() != values.size())
    throw ShapeError("rhythm name/value count mismatch");
  std::ostringstream out;
  for (std::size_t i = 0; i < names.size(); ++i)
    out << (i ? "," : "") << names[i];
  out << "\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out << (i ? "," : "") << csv::format_double(values[i]);
  out << "\n";
  return out.str();
}

std::string ranking_csv(const FeatureRanking& ranking) {
  std::ostringstream out;
  out << "feature,mi,rank\n";
  for (std::size_t i = 0; i < ranking.ranked.size(); ++i)
    out << ranking.ranked[i].name << ","
        << csv::format_double(ranking.ranked[i].mi_nats) << "," << (i + 1)
        << "\n";
  return out.str();
}

}  // namespace covidrhythm
