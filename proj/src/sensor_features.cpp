#include "covidrhythm/sensor_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covidrhythm {

namespace {

struct DiffStats {
  double max_pos = 0, min_pos = 0, avg_pos = 0;
  double max_neg = 0, min_neg = 0, avg_neg = 0;  // magnitudes
  double max_abs = 0, min_abs = 0, avg_abs = 0;
  double no_change = 0;
};

// First-difference summaries. Empty categories yield zeros so downstream
// matrices stay finite.
DiffStats diff_stats(const std::vector<double>& x) {
  DiffStats s;
  if (x.size() < 2) return s;
  std::vector<double> pos, neg, abs_all;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double d = x[i] - x[i - 1];
    abs_all.push_back(std::fabs(d));
    if (d > 0)
      pos.push_back(d);
    else if (d < 0)
      neg.push_back(-d);
    else
      s.no_change += 1.0;
  }
  auto fill = [](const std::vector<double>& v, double& mx, double& mn,
                 double& avg) {
    if (v.empty()) return;
    mx = *std::max_element(v.begin(), v.end());
    mn = *std::min_element(v.begin(), v.end());
    avg = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  fill(pos, s.max_pos, s.min_pos, s.avg_pos);
  fill(neg, s.max_neg, s.min_neg, s.avg_neg);
  fill(abs_all, s.max_abs, s.min_abs, s.avg_abs);
  return s;
}

}  // namespace

const std::vector<std::string>& sensor_feature_names() {
  static const std::vector<std::string> names = {
      "rhr.mean",
      "rhr.median",
      "rhr.variance",
      "rhr.std",
      "rhr.iqr",
      "rhr.range",
      "rhr.skewness",
      "rhr.kurtosis",
      "rhr.second_momentum",
      "rhr.entropy",
      "rhr.slope",
      "rhr.max_positive_change",
      "rhr.min_positive_change",
      "rhr.avg_positive_change",
      "rhr.max_negative_change",
      "rhr.min_negative_change",
      "rhr.avg_negative_change",
      "rhr.max_absolute_change",
      "rhr.min_absolute_change",
      "rhr.avg_absolute_change",
      "rhr.no_change",
      "steps.total_steps",
      "steps.avg_steps",
      "steps.std",
      "steps.variance",
      "steps.entropy",
      "steps.max_steps_5min",
      "steps.active_bout_count",
      "steps.sedentary_bout_count",
      "steps.max_active_bout_len",
      "steps.min_active_bout_len",
      "steps.avg_active_bout_len",
      "steps.max_sedentary_bout_len",
      "steps.min_sedentary_bout_len",
      "steps.avg_sedentary_bout_len",
      "steps.min_steps_active_bout",
      "steps.max_steps_active_bout",
      "steps.avg_steps_active_bout",
      "steps.slope",
  };
  return names;
}

double series_mean(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double series_median(std::vector<double> x) {
  return series_quantile(std::move(x), 0.5);
}

double series_quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

double series_slope(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double tbar = static_cast<double>(n - 1) / 2.0;
  const double xbar = series_mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - tbar;
    num += dt * (x[i] - xbar);
    den += dt * dt;
  }
  return num / den;
}

double series_entropy(const std::vector<double>& x) {
  double sum = 0.0;
  for (double v : x) sum += std::max(0.0, v);
  if (sum <= 0.0) return 0.0;
  double h = 0.0;
  for (double v : x) {
    if (v <= 0.0) continue;
    const double p = v / sum;
    h -= p * std::log(p);
  }
  return h;
}

std::array<double, kRhrFeatureCount> extract_rhr_features(
    const std::vector<double>& window) {
  if (window.empty()) throw DataError("empty window");
  const std::size_t n = window.size();
  const double mu = series_mean(window);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : window) {
    const double d = v - mu;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double nd = static_cast<double>(n);
  const double pop_var = m2 / nd;                       // second momentum
  const double sample_var = n > 1 ? m2 / (nd - 1) : 0;  // variance column
  const double pop_std = std::sqrt(pop_var);            // std column

  // Skewness/kurtosis with the sample variance in the denominator and the
  // population moment in the numerator; degenerate (constant) windows are 0.
  double skew = 0.0, kurt = 0.0;
  if (sample_var > 0) {
    skew = (m3 / nd) / std::pow(sample_var, 1.5);
    kurt = (m4 / nd) / (sample_var * sample_var) - 3.0;
  }

  const auto [mn, mx] = std::minmax_element(window.begin(), window.end());
  const double q1 = series_quantile(window, 0.25);
  const double q3 = series_quantile(window, 0.75);
  const DiffStats d = diff_stats(window);

  return {series_mean(window),
          series_median(window),
          sample_var,
          pop_std,
          q3 - q1,
          *mx - *mn,
          skew,
          kurt,
          pop_var,
          series_entropy(window),
          series_slope(window),
          d.max_pos,
          d.min_pos,
          d.avg_pos,
          d.max_neg,
          d.min_neg,
          d.avg_neg,
          d.max_abs,
          d.min_abs,
          d.avg_abs,
          d.no_change};
}

std::array<double, kStepFeatureCount> extract_step_features(
    const std::vector<double>& window) {
  if (window.empty()) throw DataError("empty window");
  const std::size_t n = window.size();
  const double total = std::accumulate(window.begin(), window.end(), 0.0);
  const double mu = total / n;

  double m2 = 0.0;
  for (double v : window) m2 += (v - mu) * (v - mu);
  const double pop_std = std::sqrt(m2 / n);
  const double sample_var = n > 1 ? m2 / (n - 1) : 0.0;

  // Partition into consecutive 5-minute intervals (last one may be short).
  std::vector<double> interval_sums;
  for (std::size_t i = 0; i < n; i += kBoutIntervalMinutes) {
    double s = 0.0;
    for (std::size_t j = i; j < std::min(n, i + kBoutIntervalMinutes); ++j)
      s += window[j];
    interval_sums.push_back(s);
  }
  std::vector<bool> active;
  active.reserve(interval_sums.size());
  for (double s : interval_sums) active.push_back(s >= kActiveBoutThreshold);

  // Bouts: maximal runs of same-type intervals.
  std::vector<int> active_lens, sedentary_lens;
  std::vector<double> active_interval_steps;
  std::size_t i = 0;
  while (i < active.size()) {
    std::size_t j = i;
    while (j < active.size() && active[j] == active[i]) ++j;
    const int len = static_cast<int>(j - i);
    if (active[i]) {
      active_lens.push_back(len);
      for (std::size_t k = i; k < j; ++k)
        active_interval_steps.push_back(interval_sums[k]);
    } else {
      sedentary_lens.push_back(len);
    }
    i = j;
  }

  auto len_stats = [](const std::vector<int>& v) {
    std::array<double, 3> out = {0, 0, 0};  // max, min, avg
    if (v.empty()) return out;
    out[0] = *std::max_element(v.begin(), v.end());
    out[1] = *std::min_element(v.begin(), v.end());
    out[2] = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    return out;
  };
  const auto act = len_stats(active_lens);
  const auto sed = len_stats(sedentary_lens);

  double min_active_steps = 0, max_active_steps = 0, avg_active_steps = 0;
  if (!active_interval_steps.empty()) {
    min_active_steps = *std::min_element(active_interval_steps.begin(),
                                         active_interval_steps.end());
    max_active_steps = *std::max_element(active_interval_steps.begin(),
                                         active_interval_steps.end());
    avg_active_steps = std::accumulate(active_interval_steps.begin(),
                                       active_interval_steps.end(), 0.0) /
                       active_interval_steps.size();
  }

  return {total,
          mu,
          pop_std,
          sample_var,
          series_entropy(window),
          *std::max_element(interval_sums.begin(), interval_sums.end()),
          static_cast<double>(active_lens.size()),
          static_cast<double>(sedentary_lens.size()),
          act[0],
          act[1],
          act[2],
          sed[0],
          sed[1],
          sed[2],
          min_active_steps,
          max_active_steps,
          avg_active_steps,
          series_slope(window)};
}

std::vector<double> WindowFeatureMatrix::column(int feature) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[feature]);
  return out;
}

WindowFeatureMatrix extract_features(const std::vector<Window>& windows) {
  WindowFeatureMatrix m;
  m.rows.reserve(windows.size());
  for (const auto& w : windows) {
    const auto rhr = extract_rhr_features(w.rhr);
    const auto st = extract_step_features(w.steps);
    std::array<double, kSensorFeatureCount> row{};
    std::copy(rhr.begin(), rhr.end(), row.begin());
    std::copy(st.begin(), st.end(), row.begin() + kRhrFeatureCount);
    for (double v : row)
      if (!std::isfinite(v)) throw DataError("non-finite feature value");
    m.rows.push_back(row);
    m.window_start_minutes.push_back(w.start_minute);
  }
  return m;
}

}  // namespace covidrhythm
