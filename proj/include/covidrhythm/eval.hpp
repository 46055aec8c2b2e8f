#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covidrhythm/model.hpp"

namespace covidrhythm {

struct MetricReport {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  std::optional<double> auc_roc;  // nullopt when only one class is present
};

// Confusion metrics at the threshold plus rank-based AUC (ties count 1/2).
// Positive class = infected (label 1).
MetricReport metrics(const std::vector<int>& labels,
                     const std::vector<double>& scores,
                     double threshold = 0.5, double beta = 0.1);

// Duplicates minority-class entries cyclically until class counts match.
// Returns indices into the input vector.
std::vector<std::size_t> balance_by_replication(const std::vector<int>& labels);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;  // flagged columns keep std = 0 and are only centered

  static Standardizer fit(const std::vector<std::vector<double>>& rows);
  void apply(std::vector<double>& row) const;
};

struct FoldPlan {
  // fold -> indices of test samples (one sample per subject here, so fold
  // membership is subject-wise by construction).
  std::vector<std::vector<std::size_t>> test_indices;
};

// Stratified-by-label assignment of subjects to k folds, seeded.
FoldPlan make_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

}  // namespace covidrhythm
