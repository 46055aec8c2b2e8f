#include "covidrhythm/eval.hpp"

#include <algorithm>
#include <cmath>

#include "covidrhythm/rng.hpp"

namespace covidrhythm {

MetricReport metrics(const std::vector<int>& labels,
                     const std::vector<double>& scores, double threshold,
                     double beta) {
  if (labels.size() != scores.size())
    throw ShapeError("labels/scores length mismatch");
  if (labels.empty()) throw DataError("empty metric input");

  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (labels[i] == 1)
      (pred ? tp : fn) += 1;
    else
      (pred ? fp : tn) += 1;
  }

  MetricReport r;
  r.sensitivity = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  r.specificity = tn + fp > 0 ? tn / (tn + fp) : 0.0;
  r.recall = r.sensitivity;
  r.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double b2 = beta * beta;
  const double denom = b2 * r.precision + r.recall;
  r.f_beta = denom > 0 ? (1 + b2) * r.precision * r.recall / denom : 0.0;

  // AUC via pairwise concordance, ties counted one half.
  const double npos = tp + fn, nneg = tn + fp;
  if (npos > 0 && nneg > 0) {
    double concordant = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != 1) continue;
      for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] != 0) continue;
        if (scores[i] > scores[j])
          concordant += 1.0;
        else if (scores[i] == scores[j])
          concordant += 0.5;
      }
    }
    r.auc_roc = concordant / (npos * nneg);
  }
  return r;
}

std::vector<std::size_t> balance_by_replication(const std::vector<int>& labels) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw DataError("balancing requires both classes");

  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = i;
  const auto& minority = pos.size() < neg.size() ? pos : neg;
  const std::size_t deficit =
      std::max(pos.size(), neg.size()) - minority.size();
  for (std::size_t i = 0; i < deficit; ++i)
    out.push_back(minority[i % minority.size()]);
  return out;
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DataError("cannot fit standardizer on empty data");
  const std::size_t cols = rows[0].size();
  Standardizer s;
  s.mean.assign(cols, 0.0);
  s.std.assign(cols, 0.0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < cols; ++c) s.mean[c] += r[c];
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto& r : rows)
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = r[c] - s.mean[c];
      s.std[c] += d * d;
    }
  for (std::size_t c = 0; c < cols; ++c) {
    s.std[c] = std::sqrt(s.std[c] / static_cast<double>(rows.size()));
    if (s.std[c] < 1e-12) s.std[c] = 0.0;  // constant column: center only
  }
  return s;
}

void Standardizer::apply(std::vector<double>& row) const {
  if (row.size() != mean.size())
    throw ShapeError("standardizer column count mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) {
    row[c] -= mean[c];
    if (std[c] > 0.0) row[c] /= std[c];
  }
}

FoldPlan make_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least two folds");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(i);

  Rng rng(derive_seed(seed, "fold-plan"));
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);

  FoldPlan plan;
  plan.test_indices.resize(k);
  std::size_t turn = 0;
  for (std::size_t i : pos) plan.test_indices[turn++ % k].push_back(i);
  for (std::size_t i : neg) plan.test_indices[turn++ % k].push_back(i);
  for (auto& fold : plan.test_indices) std::sort(fold.begin(), fold.end());
  return plan;
}

}  // namespace covidrhythm
