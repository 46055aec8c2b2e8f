#include "covidrhythm/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace covidrhythm {

int WindowSpec::step_minutes() const {
  if (width_minutes <= 0)
    throw ConfigError("window width must be positive");
  if (overlap_fraction < 0.0 || overlap_fraction >= 1.0)
    throw ConfigError("overlap fraction must be in [0,1)");
  const double step = width_minutes * (1.0 - overlap_fraction);
  const int istep = static_cast<int>(std::lround(step));
  if (istep <= 0 || std::abs(step - istep) > 1e-9)
    throw ConfigError("window step must be a positive whole minute count");
  return istep;
}

std::vector<double> resting_heart_rate(const std::vector<double>& hr,
                                       const std::vector<double>& steps) {
  if (hr.size() != steps.size())
    throw ShapeError("hr and steps length mismatch");
  const std::size_t n = hr.size();
  std::vector<double> rhr(n);
  double carried = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    const std::size_t end = std::min(n, k + 6);  // k..k+5 inclusive
    for (std::size_t m = k; m < end; ++m) sum += steps[m];
    if (sum == 0.0) {
      rhr[k] = hr[k];
      carried = hr[k];
    } else {
      rhr[k] = carried;
    }
  }
  return rhr;
}

bool gate_missing(const std::vector<std::optional<double>>& day) {
  const std::size_t missing =
      static_cast<std::size_t>(std::count(day.begin(), day.end(), std::nullopt));
  return static_cast<double>(missing) <=
         kMissingGate * static_cast<double>(day.size());
}

FilledSeries interpolate_linear(const std::vector<std::optional<double>>& day) {
  const std::size_t n = day.size();
  FilledSeries out;
  out.values.resize(n);
  out.provenance.resize(n, Provenance::Interpolated);

  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < n; ++i)
    if (day[i].has_value()) observed.push_back(i);
  if (observed.empty()) throw DataError("series has no observed values");

  for (std::size_t i : observed) {
    out.values[i] = *day[i];
    out.provenance[i] = Provenance::Observed;
  }
  // leading / trailing extension
  for (std::size_t i = 0; i < observed.front(); ++i)
    out.values[i] = *day[observed.front()];
  for (std::size_t i = observed.back() + 1; i < n; ++i)
    out.values[i] = *day[observed.back()];
  // interior gaps
  for (std::size_t g = 0; g + 1 < observed.size(); ++g) {
    const std::size_t x0 = observed[g];
    const std::size_t x1 = observed[g + 1];
    const double f0 = *day[x0];
    const double f1 = *day[x1];
    for (std::size_t x = x0 + 1; x < x1; ++x)
      out.values[x] =
          f0 + (f1 - f0) / static_cast<double>(x1 - x0) *
                   static_cast<double>(x - x0);
  }
  return out;
}

std::vector<double> smooth_sma(const std::vector<double>& series, int T) {
  if (series.empty()) throw DataError("cannot smooth an empty series");
  if (T < 1) throw ConfigError("SMA window must be >= 1");
  std::vector<double> out(series.size());
  double running = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= static_cast<std::size_t>(T)) running -= series[i - T];
    const std::size_t count = std::min<std::size_t>(i + 1, T);
    out[i] = running / static_cast<double>(count);
  }
  return out;
}

int window_count(int day_minutes, const WindowSpec& spec) {
  const int step = spec.step_minutes();
  if (spec.width_minutes > day_minutes)
    throw ConfigError("window wider than the day");
  return (day_minutes - spec.width_minutes) / step + 1;
}

std::vector<Window> segment(const DaySeries& day, const WindowSpec& spec) {
  if (day.rhr.size() != kMinutesPerDay || day.steps.size() != kMinutesPerDay)
    throw ShapeError("day series must have 1440 minutes");
  const int step = spec.step_minutes();
  const int count = window_count(kMinutesPerDay, spec);
  std::vector<Window> windows;
  windows.reserve(count);
  for (int w = 0; w < count; ++w) {
    Window win;
    win.start_minute = w * step;
    const auto begin = win.start_minute;
    const auto end = begin + spec.width_minutes;
    win.rhr.assign(day.rhr.begin() + begin, day.rhr.begin() + end);
    win.steps.assign(day.steps.begin() + begin, day.steps.begin() + end);
    windows.push_back(std::move(win));
  }
  return windows;
}

DaySeries build_day_series(const std::vector<std::optional<double>>& hr,
                           const std::vector<std::optional<double>>& steps,
                           const PreprocessConfig& cfg) {
  if (hr.size() != kMinutesPerDay || steps.size() != kMinutesPerDay)
    throw ShapeError("expected 1440-minute grids");
  if (!gate_missing(hr))
    throw DataError("day rejected: more than 10% of minutes missing");

  FilledSeries hr_filled = interpolate_linear(hr);
  std::vector<double> step_filled(kMinutesPerDay, 0.0);
  for (int i = 0; i < kMinutesPerDay; ++i)
    if (steps[i].has_value()) step_filled[i] = std::max(0.0, *steps[i]);

  std::vector<double> rhr = resting_heart_rate(hr_filled.values, step_filled);

  DaySeries day;
  day.rhr = smooth_sma(rhr, cfg.sma_minutes);
  day.steps = smooth_sma(step_filled, cfg.sma_minutes);
  day.provenance = std::move(hr_filled.provenance);
  return day;
}

}  // namespace covidrhythm
