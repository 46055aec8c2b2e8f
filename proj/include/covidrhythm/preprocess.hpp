#pragma once

#include <optional>
#include <vector>

#include "covidrhythm/errors.hpp"

namespace covidrhythm {

constexpr int kMinutesPerDay = 1440;

// Fraction of a day's minutes that may be missing before the day is dropped.
constexpr double kMissingGate = 0.10;

enum class Provenance : unsigned char { Observed, Interpolated };

// One labeled 24-hour sample after gap fill and smoothing: minute-resolution
// resting heart rate plus step counts.
struct DaySeries {
  std::vector<double> rhr;     // 1440 entries, finite, positive after fill
  std::vector<double> steps;   // 1440 entries, >= 0
  std::vector<Provenance> provenance;  // per minute, for the rhr stream
};

struct WindowSpec {
  int width_minutes = 60;
  double overlap_fraction = 0.5;

  // Stride between window starts; throws ConfigError unless it is a
  // positive whole number of minutes.
  int step_minutes() const;
};

struct Window {
  int start_minute = 0;
  std::vector<double> rhr;
  std::vector<double> steps;
};

// Algorithm: walk the day minute by minute; a minute is "resting" when the
// step sum over minutes k..k+5 (clamped at the end of the series) is zero.
// Resting minutes emit the observed heart rate and refresh the carried
// value; active minutes emit the carried value, which starts at 0.
std::vector<double> resting_heart_rate(const std::vector<double>& hr,
                                       const std::vector<double>& steps);

// Accept a day iff strictly more than 10% of its minutes are missing.
bool gate_missing(const std::vector<std::optional<double>>& day);

struct FilledSeries {
  std::vector<double> values;
  std::vector<Provenance> provenance;
};

// Interior gaps are filled linearly between the bracketing observations;
// leading/trailing gaps extend the nearest observation.
FilledSeries interpolate_linear(const std::vector<std::optional<double>>& day);

// Trailing moving average of length T; the first T-1 outputs average the
// available prefix.
std::vector<double> smooth_sma(const std::vector<double>& series, int T);

std::vector<Window> segment(const DaySeries& day, const WindowSpec& spec);

// Window count for a given day length and spec (floor((len-width)/step)+1).
int window_count(int day_minutes, const WindowSpec& spec);

struct PreprocessConfig {
  int sma_minutes = 5;
  WindowSpec window;
};

// Raw minute grids (nullopt = missing minute) -> smoothed DaySeries.
// Missing step minutes count as zero steps. Throws DataError when the
// heart-rate stream fails the missing gate.
DaySeries build_day_series(const std::vector<std::optional<double>>& hr,
                           const std::vector<std::optional<double>>& steps,
                           const PreprocessConfig& cfg);

}  // namespace covidrhythm
