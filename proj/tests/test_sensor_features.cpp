#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "covidrhythm/sensor_features.hpp"
#include "doctest.h"

using namespace covidrhythm;

namespace {

// Independent brute-force reference for the distribution moments: straight
// two-pass evaluation of the printed formulas, no shared helpers.
struct MomentOracle {
  double mean, sample_var, pop_std, pop_var, skew, kurt;
};

MomentOracle moment_oracle(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double s2 = 0, s3 = 0, s4 = 0;
  for (double v : x) {
    s2 += std::pow(v - mean, 2);
    s3 += std::pow(v - mean, 3);
    s4 += std::pow(v - mean, 4);
  }
  MomentOracle o;
  o.mean = mean;
  o.sample_var = x.size() > 1 ? s2 / (n - 1) : 0;
  o.pop_var = s2 / n;
  o.pop_std = std::sqrt(s2 / n);
  o.skew = o.sample_var > 0 ? (s3 / n) / std::pow(o.sample_var, 1.5) : 0;
  o.kurt = o.sample_var > 0
               ? (s4 / n) / (o.sample_var * o.sample_var) - 3.0
               : 0;
  return o;
}

int idx(const std::string& name) {
  const auto& names = sensor_feature_names();
  return static_cast<int>(
      std::find(names.begin(), names.end(), name) - names.begin());
}

}  // namespace

TEST_CASE("registry holds exactly 21 rhr and 18 step features") {
  const auto& names = sensor_feature_names();
  REQUIRE(names.size() == 39);
  int rhr = 0, steps = 0;
  for (const auto& n : names) {
    if (n.rfind("rhr.", 0) == 0) ++rhr;
    if (n.rfind("steps.", 0) == 0) ++steps;
  }
  CHECK(rhr == 21);
  CHECK(steps == 18);
}

TEST_CASE("constant rhr window") {
  const std::vector<double> w(60, 70.0);
  const auto f = extract_rhr_features(w);
  CHECK(f[idx("rhr.mean")] == 70.0);
  CHECK(f[idx("rhr.variance")] == 0.0);
  CHECK(f[idx("rhr.skewness")] == 0.0);
  CHECK(f[idx("rhr.slope")] == 0.0);
  CHECK(f[idx("rhr.no_change")] == 59.0);
}

TEST_CASE("simple ramp window per the printed formulas") {
  const std::vector<double> w = {1, 2, 3, 4, 5};
  const auto f = extract_rhr_features(w);
  CHECK(f[idx("rhr.mean")] == doctest::Approx(3.0));
  CHECK(f[idx("rhr.median")] == doctest::Approx(3.0));
  CHECK(f[idx("rhr.iqr")] == doctest::Approx(2.0));
  CHECK(f[idx("rhr.range")] == doctest::Approx(4.0));
  CHECK(f[idx("rhr.slope")] == doctest::Approx(1.0));
  CHECK(f[idx("rhr.avg_positive_change")] == doctest::Approx(1.0));
}

TEST_CASE("first-difference features on a short window") {
  const std::vector<double> w = {1, 3, 2};
  const auto f = extract_rhr_features(w);
  CHECK(f[idx("rhr.max_positive_change")] == doctest::Approx(2.0));
  CHECK(f[idx("rhr.max_negative_change")] == doctest::Approx(1.0));
  CHECK(f[idx("rhr.avg_absolute_change")] == doctest::Approx(1.5));
}

TEST_CASE("moments match the brute-force reference on random windows") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> dist(70.0, 8.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(60);
    for (double& v : w) v = dist(rng);
    const auto f = extract_rhr_features(w);
    const auto o = moment_oracle(w);
    CHECK(f[idx("rhr.mean")] == doctest::Approx(o.mean).epsilon(1e-9));
    CHECK(f[idx("rhr.variance")] ==
          doctest::Approx(o.sample_var).epsilon(1e-9));
    CHECK(f[idx("rhr.std")] == doctest::Approx(o.pop_std).epsilon(1e-9));
    CHECK(f[idx("rhr.second_momentum")] ==
          doctest::Approx(o.pop_var).epsilon(1e-9));
    CHECK(f[idx("rhr.skewness")] == doctest::Approx(o.skew).epsilon(1e-9));
    CHECK(f[idx("rhr.kurtosis")] == doctest::Approx(o.kurt).epsilon(1e-9));
  }
}

TEST_CASE("features are invariant under time translation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  std::vector<double> w(60);
  for (double& v : w) v = dist(rng);
  const auto a = extract_rhr_features(w);
  const auto b = extract_rhr_features(w);  // same values, new call
  CHECK(a == b);
}

TEST_CASE("entropy of uniform positive window is log n") {
  const std::vector<double> w(32, 4.2);
  CHECK(series_entropy(w) == doctest::Approx(std::log(32.0)).epsilon(1e-12));
  CHECK(series_entropy(std::vector<double>(10, 0.0)) == 0.0);
  CHECK(series_entropy({1.0}) == doctest::Approx(0.0));
}

TEST_CASE("all-zero step window forms one sedentary bout") {
  const std::vector<double> w(60, 0.0);
  const auto f = extract_step_features(w);
  CHECK(f[idx("steps.total_steps") - kRhrFeatureCount] == 0.0);
  CHECK(f[idx("steps.active_bout_count") - kRhrFeatureCount] == 0.0);
  CHECK(f[idx("steps.sedentary_bout_count") - kRhrFeatureCount] == 1.0);
  CHECK(f[idx("steps.max_sedentary_bout_len") - kRhrFeatureCount] == 12.0);
}

TEST_CASE("active bout spanning two intervals") {
  // 5-minute interval sums: 0, 0, 50, 60, 0, ...
  std::vector<double> w(60, 0.0);
  w[10] = 50.0;  // third interval
  w[15] = 60.0;  // fourth interval
  const auto f = extract_step_features(w);
  const int base = kRhrFeatureCount;
  CHECK(f[idx("steps.max_steps_5min") - base] == 60.0);
  CHECK(f[idx("steps.active_bout_count") - base] == 1.0);
  CHECK(f[idx("steps.max_active_bout_len") - base] == 2.0);
  CHECK(f[idx("steps.min_steps_active_bout") - base] == 50.0);
  CHECK(f[idx("steps.max_steps_active_bout") - base] == 60.0);
  CHECK(f[idx("steps.avg_steps_active_bout") - base] == 55.0);
  CHECK(f[idx("steps.sedentary_bout_count") - base] == 2.0);
}

TEST_CASE("an interval summing exactly to 10 is active") {
  std::vector<double> w(10, 0.0);
  w[2] = 10.0;  // first interval sums to 10
  const auto f = extract_step_features(w);
  CHECK(f[idx("steps.active_bout_count") - kRhrFeatureCount] == 1.0);
}

TEST_CASE("bout counts partition the intervals") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> coin(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> w(60, 0.0);
    for (int i = 0; i < 12; ++i)
      if (coin(rng) == 0) w[i * 5] = 25.0;
    const auto f = extract_step_features(w);
    const int base = kRhrFeatureCount;
    const double na = f[idx("steps.active_bout_count") - base];
    const double ns = f[idx("steps.sedentary_bout_count") - base];
    // sum of bout lengths = number of intervals
    double length_sum = 0.0;
    if (na > 0) length_sum += na * f[idx("steps.avg_active_bout_len") - base];
    if (ns > 0)
      length_sum += ns * f[idx("steps.avg_sedentary_bout_len") - base];
    CHECK(length_sum == doctest::Approx(12.0));
  }
}

TEST_CASE("empty windows are rejected") {
  CHECK_THROWS_AS(extract_rhr_features({}), DataError);
  CHECK_THROWS_AS(extract_step_features({}), DataError);
}
