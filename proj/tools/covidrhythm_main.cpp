// covidrhythm: wearable heart-rate/step pipeline CLI.
//
// Subcommands mirror the pipeline stages (synth -> ingest -> preprocess ->
// featurize -> select / train / evaluate / sweep / predict). Every output
// directory receives a run_config.json with the full effective config, the
// seed, and the tool version. Failures exit nonzero after printing a
// machine-readable error JSON on stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <algorithm>
#include <array>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "covidrhythm/csv.hpp"
#include "covidrhythm/pipeline.hpp"
#include "covidrhythm/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace covidrhythm;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Options shared by the pipeline subcommands; resolved into a
// PipelineConfig by merging (defaults | config file | --set | flags).
struct ConfigOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> features;
  std::optional<double> overlap;
  std::optional<int> heads;
  std::optional<double> period;
  int jobs = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pipeline config JSON");
    cmd->add_option("--set", sets,
                    "config override, dotted.key=json-value (repeatable)");
    cmd->add_option("--seed", seed, "master RNG seed");
    cmd->add_option("--features", features, "feature schema: mi|paper-top10")
        ->check(CLI::IsMember({"mi", "paper-top10"}));
    cmd->add_option("--overlap", overlap, "window overlap fraction");
    cmd->add_option("--heads", heads, "attention head count");
    cmd->add_option("--period", period, "single cosinor period, hours");
    cmd->add_option("--jobs", jobs, "parallel sweep runs")
        ->check(CLI::PositiveNumber);
  }

  PipelineConfig resolve() const {
    json doc = json::parse(PipelineConfig().to_json());
    if (!config_path.empty()) {
      doc = json::parse(read_text(config_path), nullptr, false);
      if (doc.is_discarded())
        throw ParseError("malformed config file: " + config_path);
    }
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string raw = kv.substr(eq + 1);
      json value = json::parse(raw, nullptr, false);
      if (value.is_discarded()) value = raw;  // bare strings allowed
      json* node = &doc;
      std::size_t pos = 0;
      while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot - pos);
        if (part.empty()) throw ConfigError("bad --set key '" + key + "'");
        if (dot == std::string::npos) {
          (*node)[part] = value;
          break;
        }
        node = &(*node)[part];
        pos = dot + 1;
      }
    }
    if (seed) doc["seed"] = *seed;
    if (features) doc["features"] = *features;
    if (overlap) doc["preprocess"]["overlap"] = *overlap;
    if (heads) doc["network"]["heads"] = *heads;
    if (period) doc["rhythm"]["periods_hours"] = {*period};
    return PipelineConfig::from_json(doc.dump());
  }
};

void write_run_config(const fs::path& out_dir, const PipelineConfig& cfg,
                      const std::string& command) {
  json j;
  j["tool"] = "covidrhythm";
  j["version"] = COVIDRHYTHM_VERSION;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config"] = json::parse(cfg.to_json());
  write_text(out_dir / "run_config.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Intermediate artifacts

std::string labeled_days_csv(const std::vector<LabeledDayRef>& refs) {
  std::ostringstream out;
  out << "subject_id,day_start,label\n";
  for (const auto& r : refs)
    out << r.subject_id << "," << format_iso8601(r.day_start) << ","
        << (r.label == DayLabel::Infected ? "infected" : "healthy") << "\n";
  return out.str();
}

std::vector<LabeledDayRef> parse_labeled_days(const fs::path& path) {
  const csv::Table t = csv::read_file(path.string());
  const auto ci = t.column("subject_id");
  const auto cd = t.column("day_start");
  const auto cl = t.column("label");
  std::vector<LabeledDayRef> refs;
  for (const auto& row : t.rows) {
    LabeledDayRef r;
    r.subject_id = row[ci];
    const auto ts = parse_iso8601(row[cd]);
    if (!ts) throw ParseError("bad day_start in " + path.string());
    r.day_start = *ts;
    if (row[cl] == "infected")
      r.label = DayLabel::Infected;
    else if (row[cl] == "healthy")
      r.label = DayLabel::Healthy;
    else
      throw ParseError("bad label '" + row[cl] + "' in " + path.string());
    refs.push_back(std::move(r));
  }
  return refs;
}

DaySeries parse_day_series(const fs::path& path) {
  const csv::Table t = csv::read_file(path.string());
  const auto cm = t.column("minute");
  const auto cr = t.column("rhr");
  const auto cs = t.column("steps");
  if (t.rows.size() != static_cast<std::size_t>(kMinutesPerDay))
    throw ParseError(path.string() + ": expected 1440 rows, got " +
                     std::to_string(t.rows.size()));
  DaySeries day;
  day.rhr.resize(kMinutesPerDay);
  day.steps.resize(kMinutesPerDay);
  day.provenance.assign(kMinutesPerDay, Provenance::Observed);
  for (const auto& row : t.rows) {
    const int m = std::stoi(row[cm]);
    if (m < 0 || m >= kMinutesPerDay)
      throw ParseError(path.string() + ": minute out of range");
    day.rhr[m] = std::stod(row[cr]);
    day.steps[m] = std::stod(row[cs]);
  }
  return day;
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  static const char* kKindNames[] = {"missing_column",   "unparseable_row",
                                     "duplicate_timestamp",
                                     "infected_without_onset",
                                     "no_eligible_day",  "out_of_order"};
  json arr = json::array();
  for (const auto& d : diags) {
    json j;
    j["kind"] = kKindNames[static_cast<int>(d.kind)];
    j["file"] = d.file;
    j["line"] = d.line;
    j["message"] = d.message;
    j["severity"] = d.is_error ? "error" : "warning";
    arr.push_back(std::move(j));
  }
  return arr;
}

json samples_to_json(const std::vector<SampleRecord>& samples,
                     const PipelineConfig& cfg) {
  json j;
  j["format"] = "covidrhythm-samples-v1";
  j["version"] = COVIDRHYTHM_VERSION;
  j["config"] = json::parse(cfg.to_json());
  j["sensor_features"] = sensor_feature_names();
  j["rhythm_features"] = rhythm_feature_names(cfg.rhythm);
  json arr = json::array();
  for (const auto& s : samples) {
    json sj;
    sj["subject_id"] = s.subject_id;
    sj["day_start"] = format_iso8601(s.day_start);
    sj["label"] = s.label;
    sj["window_start_minutes"] = s.sensor.window_start_minutes;
    json rows = json::array();
    for (const auto& row : s.sensor.rows)
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    sj["sensor"] = std::move(rows);
    sj["rhythm"] = s.rhythm_values;
    arr.push_back(std::move(sj));
  }
  j["samples"] = std::move(arr);
  return j;
}

std::vector<SampleRecord> samples_from_json(const fs::path& path) {
  const json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded() || j.value("format", "") != "covidrhythm-samples-v1")
    throw ParseError("not a covidrhythm samples file: " + path.string());
  std::vector<SampleRecord> samples;
  for (const auto& sj : j.at("samples")) {
    SampleRecord s;
    s.subject_id = sj.at("subject_id");
    const auto ts = parse_iso8601(sj.at("day_start"));
    if (!ts) throw ParseError("bad day_start in " + path.string());
    s.day_start = *ts;
    s.label = sj.at("label");
    s.sensor.window_start_minutes =
        sj.at("window_start_minutes").get<std::vector<int>>();
    for (const auto& row : sj.at("sensor")) {
      const auto vals = row.get<std::vector<double>>();
      if (vals.size() != kSensorFeatureCount)
        throw ParseError("sensor row width mismatch in " + path.string());
      std::array<double, kSensorFeatureCount> arr{};
      std::copy(vals.begin(), vals.end(), arr.begin());
      s.sensor.rows.push_back(arr);
    }
    s.rhythm_values = sj.at("rhythm").get<std::vector<double>>();
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw DataError("no samples in " + path.string());
  return samples;
}

// Loads the raw CSV trio from a directory, failing on error diagnostics.
ParseResult load_streams(const fs::path& dir) {
  for (const char* name : {"heart_rate.csv", "steps.csv", "labels.csv"})
    if (!fs::exists(dir / name))
      throw DataError("missing input file: " + (dir / name).string());
  return parse_streams((dir / "heart_rate.csv").string(),
                       (dir / "steps.csv").string(),
                       (dir / "labels.csv").string());
}

std::vector<SampleRecord> samples_from_raw(const fs::path& dir,
                                           const PipelineConfig& cfg) {
  const ParseResult parsed = load_streams(dir);
  std::vector<Diagnostic> diags = parsed.diagnostics;
  const auto refs =
      select_labeled_days(parsed.streams, derive_seed(cfg.seed, "day-select"),
                          &diags);
  for (const auto& d : diags)
    if (d.is_error)
      std::cerr << d.file << ":" << d.line << ": " << d.message << "\n";
  return build_samples(parsed.streams, refs, cfg);
}

std::string metric_table(const MetricReport& mean, const MetricReport& sd) {
  std::ostringstream out;
  auto row = [&](const char* name, double m, double s) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%-12s %7.4f +/- %.4f\n", name, m, s);
    out << buf;
  };
  row("sensitivity", mean.sensitivity, sd.sensitivity);
  row("specificity", mean.specificity, sd.specificity);
  row("precision", mean.precision, sd.precision);
  row("recall", mean.recall, sd.recall);
  row("f_beta", mean.f_beta, sd.f_beta);
  if (mean.auc_roc)
    row("auc_roc", *mean.auc_roc, sd.auc_roc ? *sd.auc_roc : 0.0);
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_synth(const ConfigOpts& opts, const fs::path& out_dir, int healthy,
              int infected, int days) {
  const PipelineConfig cfg = opts.resolve();
  CohortSpec spec;
  spec.n_healthy = healthy;
  spec.n_infected = infected;
  spec.days_per_subject = days;
  spec.seed = cfg.seed;
  const SynthCohort cohort = generate(spec);
  write_text(out_dir / "heart_rate.csv", serialize_streams_hr(cohort.streams));
  write_text(out_dir / "steps.csv", serialize_streams_steps(cohort.streams));
  write_text(out_dir / "labels.csv", serialize_streams_labels(cohort.streams));
  write_text(out_dir / "ground_truth.json", truth_to_json(cohort, spec));
  write_run_config(out_dir, cfg, "synth");
  std::cout << "wrote cohort of " << cohort.streams.size() << " subjects to "
            << out_dir.string() << "\n";
  return 0;
}

int cmd_ingest(const ConfigOpts& opts, const fs::path& in_dir,
               const fs::path& out_dir) {
  const PipelineConfig cfg = opts.resolve();
  const ParseResult parsed = load_streams(in_dir);
  std::vector<Diagnostic> diags = parsed.diagnostics;
  const auto refs = select_labeled_days(
      parsed.streams, derive_seed(cfg.seed, "day-select"), &diags);
  write_text(out_dir / "heart_rate.csv", serialize_streams_hr(parsed.streams));
  write_text(out_dir / "steps.csv", serialize_streams_steps(parsed.streams));
  write_text(out_dir / "labels.csv",
             serialize_streams_labels(parsed.streams));
  write_text(out_dir / "labeled_days.csv", labeled_days_csv(refs));
  write_text(out_dir / "diagnostics.json", diagnostics_json(diags).dump(2) + "\n");
  write_run_config(out_dir, cfg, "ingest");
  int errors = 0;
  for (const auto& d : diags) errors += d.is_error;
  std::cout << parsed.streams.size() << " subjects, " << refs.size()
            << " labeled days, " << diags.size() << " diagnostics (" << errors
            << " errors)\n";
  return 0;
}

int cmd_preprocess(const ConfigOpts& opts, const fs::path& in_dir,
                   const fs::path& out_dir) {
  const PipelineConfig cfg = opts.resolve();
  const ParseResult parsed = load_streams(in_dir);
  std::vector<LabeledDayRef> refs;
  if (fs::exists(in_dir / "labeled_days.csv"))
    refs = parse_labeled_days(in_dir / "labeled_days.csv");
  else
    refs = select_labeled_days(parsed.streams,
                               derive_seed(cfg.seed, "day-select"));
  for (const auto& ref : refs) {
    const SubjectStream* stream = nullptr;
    for (const auto& s : parsed.streams)
      if (s.subject_id == ref.subject_id) stream = &s;
    if (stream == nullptr)
      throw DataError("labeled day references unknown subject " +
                      ref.subject_id);
    const MinuteGrids grids = resample_day(*stream, ref.day_start);
    const DaySeries day =
        build_day_series(grids.hr, grids.steps, cfg.preprocess);
    write_text(out_dir / "days" / (ref.subject_id + ".csv"),
               day_series_csv(day));
  }
  write_text(out_dir / "labeled_days.csv", labeled_days_csv(refs));
  write_run_config(out_dir, cfg, "preprocess");
  std::cout << "preprocessed " << refs.size() << " labeled days\n";
  return 0;
}

int cmd_featurize(const ConfigOpts& opts, const fs::path& in_dir,
                  const fs::path& out_dir) {
  const PipelineConfig cfg = opts.resolve();
  const auto refs = parse_labeled_days(in_dir / "labeled_days.csv");
  std::vector<SampleRecord> samples;
  for (const auto& ref : refs) {
    const DaySeries day =
        parse_day_series(in_dir / "days" / (ref.subject_id + ".csv"));
    SampleRecord rec =
        build_sample(day, ref.subject_id, ref.day_start,
                     ref.label == DayLabel::Infected ? 1 : 0, cfg);
    write_text(out_dir / "features" / (ref.subject_id + ".csv"),
               features_csv(rec.sensor));
    write_text(out_dir / "rhythms" / (ref.subject_id + ".csv"),
               rhythms_csv(rhythm_feature_names(cfg.rhythm),
                           rec.rhythm_values));
    samples.push_back(std::move(rec));
  }
  write_text(out_dir / "samples.json",
             samples_to_json(samples, cfg).dump(2) + "\n");
  write_run_config(out_dir, cfg, "featurize");
  std::cout << "featurized " << samples.size() << " samples\n";
  return 0;
}

// Accepts either a featurize output dir (samples.json) or a raw CSV dir.
std::vector<SampleRecord> load_samples(const fs::path& in_dir,
                                       const PipelineConfig& cfg) {
  if (fs::exists(in_dir / "samples.json"))
    return samples_from_json(in_dir / "samples.json");
  return samples_from_raw(in_dir, cfg);
}

int cmd_select(const ConfigOpts& opts, const fs::path& in_dir,
               const fs::path& out_dir) {
  const PipelineConfig cfg = opts.resolve();
  const auto samples = load_samples(in_dir, cfg);
  const auto sensor = rank_sensor_features(samples, cfg);
  const auto rhythm = rank_rhythm_features(samples, cfg);
  write_text(out_dir / "ranking_sensor.csv", ranking_csv(sensor));
  write_text(out_dir / "ranking_rhythm.csv", ranking_csv(rhythm));
  write_run_config(out_dir, cfg, "select");
  std::cout << "top sensor feature: " << sensor.ranked.front().name
            << "\ntop rhythm feature: " << rhythm.ranked.front().name << "\n";
  return 0;
}

int cmd_train(const ConfigOpts& opts, const fs::path& in_dir,
              const fs::path& out_dir) {
  const PipelineConfig cfg = opts.resolve();
  const auto samples = load_samples(in_dir, cfg);
  std::vector<EpochLog> log;
  const ModelBundle bundle = train_bundle(samples, cfg, &log);
  write_text(out_dir / "model.json", bundle.to_json());
  std::ostringstream csv_out;
  csv_out << "epoch,lr,train_loss,val_loss\n";
  for (const auto& e : log)
    csv_out << e.epoch << "," << csv::format_double(e.lr) << ","
            << csv::format_double(e.train_loss) << ","
            << csv::format_double(e.val_loss) << "\n";
  write_text(out_dir / "training_log.csv", csv_out.str());
  write_run_config(out_dir, cfg, "train");
  std::cout << "trained on " << samples.size() << " samples ("
            << log.size() << " epochs)\n";
  return 0;
}

int cmd_evaluate(const ConfigOpts& opts, const fs::path& in_dir,
                 const fs::path& out_dir) {
  const PipelineConfig cfg = opts.resolve();
  const auto samples = load_samples(in_dir, cfg);
  const CvReport report = cross_validate(samples, cfg);
  write_text(out_dir / "summary.json", report.to_json(cfg) + "\n");
  write_run_config(out_dir, cfg, "evaluate");
  std::cout << metric_table(report.mean, report.stddev);
  return 0;
}

int cmd_predict(const ConfigOpts& opts, const fs::path& model_path,
                const fs::path& day_path) {
  (void)opts;
  const ModelBundle bundle = ModelBundle::from_json(read_text(model_path));
  const DaySeries day = parse_day_series(day_path);
  const SampleRecord rec =
      build_sample(day, day_path.stem().string(), 0, 0, bundle.cfg);
  const double p = bundle.score(rec);
  json j;
  j["probability"] = p;
  j["threshold"] = bundle.cfg.threshold;
  j["label"] = p >= bundle.cfg.threshold ? "infected" : "healthy";
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const ConfigOpts& opts, const fs::path& in_dir,
              const fs::path& out_dir, const std::string& axis) {
  const PipelineConfig base = opts.resolve();

  struct Run {
    std::string value;
    PipelineConfig cfg;
    CvReport report;
  };
  std::vector<Run> runs;
  auto add = [&](const std::string& value, PipelineConfig cfg) {
    runs.push_back({value, std::move(cfg), {}});
  };
  if (axis == "overlap") {
    for (double v : {0.0, 0.25, 0.5}) {
      PipelineConfig c = base;
      c.preprocess.window.overlap_fraction = v;
      add(csv::format_double(v), std::move(c));
    }
  } else if (axis == "heads") {
    for (int v : {0, 1, 2, 4, 8}) {
      PipelineConfig c = base;
      c.net.heads = v;
      add(std::to_string(v), std::move(c));
    }
  } else if (axis == "subsequence") {
    const int max_len =
        window_count(kMinutesPerDay, base.preprocess.window);
    for (int v = 1; v <= max_len; ++v) {
      PipelineConfig c = base;
      c.subsequence_length = v;
      add(std::to_string(v), std::move(c));
    }
  } else if (axis == "periods") {
    for (double v : {24.0, 48.0, 96.0}) {
      PipelineConfig c = base;
      c.rhythm.periods_hours = {v};
      add(csv::format_double(v), std::move(c));
    }
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }

  // Featurization depends on the config for the overlap/periods axes, so
  // those rebuild from the raw CSVs per run; runs are independent and
  // parallelize.
  const bool needs_raw = axis == "overlap" || axis == "periods";
  if (needs_raw && fs::exists(in_dir / "samples.json") &&
      !fs::exists(in_dir / "heart_rate.csv"))
    throw ConfigError("the " + axis +
                      " axis re-featurizes and needs the raw CSV directory");
  std::vector<std::exception_ptr> errors(runs.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&]() {
    while (true) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= runs.size()) return;
        i = next++;
      }
      try {
        const auto samples = needs_raw
                                 ? samples_from_raw(in_dir, runs[i].cfg)
                                 : load_samples(in_dir, runs[i].cfg);
        runs[i].report = cross_validate(samples, runs[i].cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int jobs = std::max(1, opts.jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ostringstream out;
  out << axis
      << ",sensitivity_mean,sensitivity_std,specificity_mean,specificity_std,"
         "precision_mean,precision_std,f_beta_mean,f_beta_std,auc_mean,auc_std\n";
  for (const auto& r : runs) {
    const auto& m = r.report.mean;
    const auto& s = r.report.stddev;
    out << r.value << "," << csv::format_double(m.sensitivity) << ","
        << csv::format_double(s.sensitivity) << ","
        << csv::format_double(m.specificity) << ","
        << csv::format_double(s.specificity) << ","
        << csv::format_double(m.precision) << ","
        << csv::format_double(s.precision) << ","
        << csv::format_double(m.f_beta) << ","
        << csv::format_double(s.f_beta) << ","
        << csv::format_double(m.auc_roc.value_or(0.0)) << ","
        << csv::format_double(s.auc_roc.value_or(0.0)) << "\n";
  }
  write_text(out_dir / ("report_" + axis + ".csv"), out.str());
  for (const auto& r : runs)
    write_text(out_dir / ("summary_" + axis + "_" + r.value + ".json"),
               r.report.to_json(r.cfg) + "\n");
  write_run_config(out_dir, base, "sweep --axis " + axis);
  std::cout << "swept " << axis << " over " << runs.size() << " values\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wearable rhythm-disruption classification pipeline"};
  app.require_subcommand(1);

  ConfigOpts opts;
  std::string in_dir, out_dir, model_path, day_path, axis;
  int healthy = 70, infected = 25, days = 5;

  auto* synth = app.add_subcommand("synth", "generate a synthetic cohort");
  opts.attach(synth);
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--healthy", healthy, "healthy subject count");
  synth->add_option("--infected", infected, "infected subject count");
  synth->add_option("--days", days, "days per subject");

  auto* ingest = app.add_subcommand("ingest", "parse and normalize raw CSVs");
  opts.attach(ingest);
  ingest->add_option("--in", in_dir, "directory with the raw CSV trio")
      ->required();
  ingest->add_option("--out", out_dir, "output directory")->required();

  auto* preprocess =
      app.add_subcommand("preprocess", "resample, gate, fill, derive rhr");
  opts.attach(preprocess);
  preprocess->add_option("--in", in_dir, "ingest output directory")
      ->required();
  preprocess->add_option("--out", out_dir, "output directory")->required();

  auto* featurize =
      app.add_subcommand("featurize", "windowed sensor + rhythm features");
  opts.attach(featurize);
  featurize->add_option("--in", in_dir, "preprocess output directory")
      ->required();
  featurize->add_option("--out", out_dir, "output directory")->required();

  auto* select = app.add_subcommand("select", "mutual-information ranking");
  opts.attach(select);
  select->add_option("--in", in_dir, "featurize output or raw CSV directory")
      ->required();
  select->add_option("--out", out_dir, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a model on all samples");
  opts.attach(train);
  train->add_option("--in", in_dir, "featurize output or raw CSV directory")
      ->required();
  train->add_option("--out", out_dir, "output directory")->required();

  auto* evaluate =
      app.add_subcommand("evaluate", "subject-wise cross-validation");
  opts.attach(evaluate);
  evaluate->add_option("--in", in_dir, "featurize output or raw CSV directory")
      ->required();
  evaluate->add_option("--out", out_dir, "output directory")->required();

  auto* predict = app.add_subcommand("predict", "score one preprocessed day");
  opts.attach(predict);
  predict->add_option("--model", model_path, "model.json from train")
      ->required();
  predict->add_option("--day", day_path, "day series CSV (minute,rhr,steps)")
      ->required();

  auto* sweep = app.add_subcommand("sweep", "axis sweep with per-value CV");
  opts.attach(sweep);
  sweep->add_option("--in", in_dir, "featurize output or raw CSV directory")
      ->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--axis", axis, "overlap|heads|subsequence|periods")
      ->required()
      ->check(CLI::IsMember({"overlap", "heads", "subsequence", "periods"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(opts, out_dir, healthy, infected, days);
    if (ingest->parsed()) return cmd_ingest(opts, in_dir, out_dir);
    if (preprocess->parsed()) return cmd_preprocess(opts, in_dir, out_dir);
    if (featurize->parsed()) return cmd_featurize(opts, in_dir, out_dir);
    if (select->parsed()) return cmd_select(opts, in_dir, out_dir);
    if (train->parsed()) return cmd_train(opts, in_dir, out_dir);
    if (evaluate->parsed()) return cmd_evaluate(opts, in_dir, out_dir);
    if (predict->parsed()) return cmd_predict(opts, model_path, day_path);
    if (sweep->parsed()) return cmd_sweep(opts, in_dir, out_dir, axis);
  } catch (const Error& e) {
    json j;
    j["error"] = "pipeline_error";
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json j;
    j["error"] = "internal_error";
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
    return 2;
  }
  return 0;
}
