#pragma once

#include <array>
#include <string>
#include <vector>

#include "covidrhythm/preprocess.hpp"

namespace covidrhythm {

constexpr int kRhrFeatureCount = 21;
constexpr int kStepFeatureCount = 18;
constexpr int kSensorFeatureCount = kRhrFeatureCount + kStepFeatureCount;

// Canonical feature names, "rhr."-prefixed block first then "steps.".
// Order is stable and is the column order of every feature matrix.
const std::vector<std::string>& sensor_feature_names();

// Steps-in-5-minutes threshold separating sedentary from active intervals;
// a sum of exactly 10 counts as active.
constexpr double kActiveBoutThreshold = 10.0;
constexpr int kBoutIntervalMinutes = 5;

std::array<double, kRhrFeatureCount> extract_rhr_features(
    const std::vector<double>& window);

std::array<double, kStepFeatureCount> extract_step_features(
    const std::vector<double>& window);

// Rows = windows, columns = sensor_feature_names().
struct WindowFeatureMatrix {
  std::vector<std::array<double, kSensorFeatureCount>> rows;
  std::vector<int> window_start_minutes;

  std::size_t window_count() const { return rows.size(); }
  // Column as a time series (one value per window).
  std::vector<double> column(int feature) const;
};

WindowFeatureMatrix extract_features(const std::vector<Window>& windows);

// Shared statistical helpers (also used by the step features and tests).
double series_mean(const std::vector<double>& x);
double series_median(std::vector<double> x);
// Linear-interpolation quantile, q in [0,1].
double series_quantile(std::vector<double> x, double q);
// Least-squares slope of x against its 0-based index.
double series_slope(const std::vector<double>& x);
// Distribution entropy of sum-normalized non-negative values, natural log.
double series_entropy(const std::vector<double>& x);

}  // namespace covidrhythm
