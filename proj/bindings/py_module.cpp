// Python bindings for the core operations: preprocessing, sensor features,
// rhythm parameters, feature selection, metrics, and the synthetic cohort
// generator. The CLI remains the primary interface; these exist for
// interactive analysis and the smoke tests.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "covidrhythm/pipeline.hpp"

namespace py = pybind11;
using namespace covidrhythm;

namespace {

py::dict fit_to_dict(const CosinorFit& fit) {
  py::dict d;
  d["period_hours"] = fit.period_hours;
  d["mesor"] = fit.mesor;
  d["amplitude"] = fit.amplitude();
  d["acrophase_hours"] = fit.acrophase_hours();
  d["rss"] = fit.rss;
  return d;
}

py::dict metrics_to_dict(const MetricReport& m) {
  py::dict d;
  d["sensitivity"] = m.sensitivity;
  d["specificity"] = m.specificity;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f_beta"] = m.f_beta;
  if (m.auc_roc)
    d["auc_roc"] = *m.auc_roc;
  else
    d["auc_roc"] = py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wearable rhythm-disruption detection core";
  m.attr("__version__") = COVIDRHYTHM_VERSION;

  py::register_exception<Error>(m, "PipelineError");

  // Preprocessing.
  m.def("resting_heart_rate", &resting_heart_rate, py::arg("hr"),
        py::arg("steps"),
        "Minute-level RHR: emit the heart rate when the 6-minute step "
        "lookahead is zero, else carry the last resting value.");
  m.def(
      "interpolate_linear",
      [](const std::vector<std::optional<double>>& day) {
        return interpolate_linear(day).values;
      },
      py::arg("day"),
      "Fill missing minutes (None) linearly; edges extend the nearest "
      "observation.");
  m.def("smooth_sma", &smooth_sma, py::arg("series"), py::arg("window"),
        "Trailing simple moving average.");
  m.def(
      "window_count",
      [](int day_minutes, int width_minutes, double overlap) {
        WindowSpec spec;
        spec.width_minutes = width_minutes;
        spec.overlap_fraction = overlap;
        return window_count(day_minutes, spec);
      },
      py::arg("day_minutes"), py::arg("width_minutes"), py::arg("overlap"));

  // Sensor features.
  m.def("sensor_feature_names",
        []() { return sensor_feature_names(); });
  m.def(
      "sensor_features",
      [](const std::vector<double>& rhr, const std::vector<double>& steps) {
        Window w;
        w.rhr = rhr;
        w.steps = steps;
        const WindowFeatureMatrix mat = extract_features({w});
        py::dict d;
        const auto& names = sensor_feature_names();
        for (int i = 0; i < kSensorFeatureCount; ++i)
          d[py::str(names[i])] = mat.rows[0][i];
        return d;
      },
      py::arg("rhr"), py::arg("steps"),
      "All 39 window features for one RHR/steps window, keyed by name.");

  // Rhythm parameters.
  m.def(
      "cosinor_fit",
      [](const std::vector<double>& t, const std::vector<double>& y,
         double period, int components) {
        return fit_to_dict(cosinor_fit(t, y, period, components));
      },
      py::arg("time_hours"), py::arg("values"), py::arg("period_hours") = 24.0,
      py::arg("components") = 1);
  m.def(
      "sample_entropy",
      [](const std::vector<double>& series, int m_len, double tolerance) {
        return sample_entropy(series, m_len, tolerance).value;
      },
      py::arg("series"), py::arg("m") = 2, py::arg("tolerance") = 0.2);
  m.def(
      "m10_l5_ra",
      [](const std::vector<double>& series, double hours_per_sample) {
        const RestActivity r = m10_l5_ra(series, hours_per_sample);
        py::dict d;
        d["m10"] = r.m10;
        d["l5"] = r.l5;
        d["ra"] = r.ra;
        return d;
      },
      py::arg("series"), py::arg("hours_per_sample"));
  m.def(
      "intradaily_variability",
      [](const std::vector<double>& series) {
        return intradaily_variability(series).value;
      },
      py::arg("series"));
  m.def(
      "rhythm_parameters",
      [](const std::vector<double>& t, const std::vector<double>& y,
         double period) {
        const RhythmVector v = rhythm_vector(t, y, period);
        py::dict d;
        const auto& names = rhythm_param_names();
        for (int i = 0; i < kRhythmParamCount; ++i)
          d[py::str(names[i])] = v.values[i];
        return d;
      },
      py::arg("time_hours"), py::arg("values"), py::arg("period_hours") = 24.0,
      "The nine rhythm parameters for one series, keyed by name.");

  // Feature selection and metrics.
  m.def("mutual_information", &mutual_information, py::arg("values"),
        py::arg("labels"), py::arg("bins") = 10);
  m.def(
      "rank_features",
      [](const std::vector<std::vector<double>>& columns,
         const std::vector<std::string>& names, const std::vector<int>& labels,
         int k, int bins) {
        const FeatureRanking r = select_top_k(columns, names, labels, k, bins);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& e : r.ranked) out.emplace_back(e.name, e.mi_nats);
        return out;
      },
      py::arg("columns"), py::arg("names"), py::arg("labels"), py::arg("k"),
      py::arg("bins") = 10);
  m.def(
      "metrics",
      [](const std::vector<int>& labels, const std::vector<double>& scores,
         double threshold, double beta) {
        return metrics_to_dict(metrics(labels, scores, threshold, beta));
      },
      py::arg("labels"), py::arg("scores"), py::arg("threshold") = 0.5,
      py::arg("beta") = 0.1);

  // Synthetic cohort (ground truth only; full streams go through the CLI).
  m.def(
      "generate_cohort_truth",
      [](int n_healthy, int n_infected, int days, std::uint64_t seed) {
        CohortSpec spec;
        spec.n_healthy = n_healthy;
        spec.n_infected = n_infected;
        spec.days_per_subject = days;
        spec.seed = seed;
        const SynthCohort cohort = generate(spec);
        py::list out;
        for (const auto& t : cohort.truth) {
          py::dict d;
          d["subject_id"] = t.subject_id;
          d["infected"] = t.infected;
          d["mesor"] = t.mesor;
          d["amplitude"] = t.amplitude;
          d["acrophase_hours"] = t.acrophase_hours;
          d["day_amplitude"] = t.day_amplitude;
          out.append(d);
        }
        return out;
      },
      py::arg("n_healthy") = 70, py::arg("n_infected") = 25,
      py::arg("days") = 5, py::arg("seed") = 42);
}
