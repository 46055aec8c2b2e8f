#pragma once

#include <string>
#include <vector>

#include "covidrhythm/errors.hpp"

namespace covidrhythm {

struct FeatureRanking {
  struct Entry {
    std::string name;
    double mi_nats = 0.0;
  };
  std::vector<Entry> ranked;  // non-increasing mi
  int k_selected = 0;

  std::vector<std::string> selected_names() const;
};

// Histogram mutual information in nats: the feature is discretized into
// equal-width bins over its observed range, labels are binary. Tiny
// negative values from numeric noise are clamped to 0.
double mutual_information(const std::vector<double>& feature_values,
                          const std::vector<int>& labels, int bins = 10);

FeatureRanking select_top_k(
    const std::vector<std::vector<double>>& columns,  // per-feature values
    const std::vector<std::string>& names, const std::vector<int>& labels,
    int k, int bins = 10);

// The fixed top-10 lists shipped as the `paper-top10` preset. Rhythm names
// carry the period suffix for the given period.
std::vector<std::string> paper_top10_sensor();
std::vector<std::string> paper_top10_rhythm(double period_hours = 24.0);

}  // namespace covidrhythm
