#include "covidrhythm/feature_select.hpp"

#include <algorithm>
#include <cmath>

namespace covidrhythm {

std::vector<std::string> FeatureRanking::selected_names() const {
  std::vector<std::string> out;
  for (int i = 0; i < k_selected; ++i) out.push_back(ranked[i].name);
  return out;
}

double mutual_information(const std::vector<double>& feature_values,
                          const std::vector<int>& labels, int bins) {
  if (feature_values.size() != labels.size())
    throw ShapeError("feature/label length mismatch");
  const std::size_t n = feature_values.size();
  if (n < 2) throw DataError("need at least two samples");
  if (bins < 2) throw ConfigError("need at least two bins");

  const bool has0 = std::find(labels.begin(), labels.end(), 0) != labels.end();
  const bool has1 = std::find(labels.begin(), labels.end(), 1) != labels.end();
  if (!has0 || !has1) return 0.0;  // degenerate labels carry no information

  const auto [mn_it, mx_it] =
      std::minmax_element(feature_values.begin(), feature_values.end());
  const double lo = *mn_it, hi = *mx_it;
  const double width = hi - lo;

  std::vector<std::array<double, 2>> joint(bins, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    int b = 0;
    if (width > 0) {
      b = static_cast<int>((feature_values[i] - lo) / width * bins);
      b = std::clamp(b, 0, bins - 1);
    }
    joint[b][labels[i] ? 1 : 0] += 1.0 / static_cast<double>(n);
  }

  double py[2] = {0.0, 0.0};
  for (const auto& row : joint) {
    py[0] += row[0];
    py[1] += row[1];
  }
  double mi = 0.0;
  for (const auto& row : joint) {
    const double px = row[0] + row[1];
    if (px <= 0) continue;
    for (int y = 0; y < 2; ++y) {
      if (row[y] <= 0) continue;
      mi += row[y] * std::log(row[y] / (px * py[y]));
    }
  }
  return std::max(0.0, mi);
}

FeatureRanking select_top_k(const std::vector<std::vector<double>>& columns,
                            const std::vector<std::string>& names,
                            const std::vector<int>& labels, int k, int bins) {
  if (columns.size() != names.size())
    throw ShapeError("column/name count mismatch");
  if (k > static_cast<int>(columns.size()))
    throw ConfigError("k exceeds feature count");

  FeatureRanking ranking;
  // Canonical (input) order index doubles as the deterministic tiebreak.
  std::vector<std::size_t> order(columns.size());
  std::vector<double> mi(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    order[i] = i;
    mi[i] = mutual_information(columns[i], labels, bins);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mi[a] > mi[b];
  });
  for (std::size_t i : order) ranking.ranked.push_back({names[i], mi[i]});
  ranking.k_selected = k;
  return ranking;
}

std::vector<std::string> paper_top10_sensor() {
  return {
      "rhr.mean",
      "rhr.median",
      "rhr.slope",
      "rhr.min_positive_change",
      "rhr.max_positive_change",
      "rhr.min_negative_change",
      "rhr.avg_negative_change",
      "rhr.min_absolute_change",
      "steps.max_steps_5min",
      "steps.max_steps_active_bout",
  };
}

std::vector<std::string> paper_top10_rhythm(double period_hours) {
  const std::string p =
      "." + std::to_string(static_cast<int>(period_hours)) + "h";
  return {
      "rhr.skewness.m10" + p,
      "rhr.max_positive_change.m10" + p,
      "steps.total_steps.iv" + p,
      "steps.avg_steps.iv" + p,
      "steps.std.iv" + p,
      "steps.variance.mse" + p,
      "steps.max_sedentary_bout_len.l5" + p,
      "steps.avg_sedentary_bout_len.ra" + p,
      "steps.slope.mesor" + p,
      "steps.slope.l5" + p,
  };
}

}  // namespace covidrhythm
