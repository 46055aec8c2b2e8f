#pragma once

#include <array>
#include <string>
#include <vector>

#include "covidrhythm/errors.hpp"

namespace covidrhythm {

// Least-squares cosinor fit: y(t) = M + sum_i a_i sin(2*pi*i*t/P)
//                                        + b_i cos(2*pi*i*t/P).
struct CosinorFit {
  double period_hours = 24.0;
  int components = 1;
  double mesor = 0.0;
  std::vector<double> sin_coeff;  // a_i
  std::vector<double> cos_coeff;  // b_i
  double rss = 0.0;

  double amplitude(int component = 1) const;
  // Time of the first peak of the fundamental component, in [0, P) hours.
  double acrophase_hours() const;
  double predict(double t_hours) const;
};

CosinorFit cosinor_fit(const std::vector<double>& time_hours,
                       const std::vector<double>& values, double period_hours,
                       int components = 1);

struct Flagged {
  double value = 0.0;
  bool degenerate = false;
};

// amplitude / mesor; a near-zero mesor is flagged and mapped to 0.
Flagged relative_amplitude(const CosinorFit& fit);

struct SampleEntropyConfig {
  int template_length = 2;      // m
  double tolerance_factor = 0.2;  // r, as a fraction of the series std
  std::vector<int> scales = {1, 2, 3};
};

// Sample entropy with Chebyshev distance at one scale; tolerance is an
// absolute value here.
Flagged sample_entropy(const std::vector<double>& series, int m,
                       double tolerance);

// Coarse-grain by non-overlapping tau-means, compute sample entropy per
// scale with tolerance r*std(original series), return the mean over scales.
Flagged sample_entropy_multiscale(const std::vector<double>& series,
                                  const SampleEntropyConfig& cfg);

struct RestActivity {
  double m10 = 0.0;
  double l5 = 0.0;
  double ra = 0.0;
  bool degenerate = false;
};

// M10/L5 over contiguous spans of an equidistant series; spacing given in
// hours per sample.
RestActivity m10_l5_ra(const std::vector<double>& series,
                       double hours_per_sample, double m_hours = 10.0,
                       double l_hours = 5.0);

// N * sum (x_i - x_{i-1})^2 / ((N-1) * sum (x_i - mean)^2); constant series
// are flagged 0.
Flagged intradaily_variability(const std::vector<double>& series);

constexpr int kRhythmParamCount = 9;
const std::vector<std::string>& rhythm_param_names();

struct RhythmVector {
  double period_hours = 24.0;
  // mesor, amplitude, acrophase, relative_amplitude, mse, m10, l5, ra, iv
  std::array<double, kRhythmParamCount> values{};
  bool any_degenerate = false;
  bool under_spanned = false;  // period exceeds the observed span
};

struct RhythmConfig {
  std::vector<double> periods_hours = {24.0};
  int components = 1;
  SampleEntropyConfig mse;
};

RhythmVector rhythm_vector(const std::vector<double>& time_hours,
                           const std::vector<double>& values,
                           double period_hours, const RhythmConfig& cfg = {});

}  // namespace covidrhythm
