#include "covidrhythm/rhythm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace covidrhythm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double CosinorFit::amplitude(int component) const {
  const int i = component - 1;
  return std::hypot(sin_coeff[i], cos_coeff[i]);
}

double CosinorFit::acrophase_hours() const {
  // a*sin(wt) + b*cos(wt) = R*cos(wt - phi) with phi = atan2(a, b);
  // the first peak sits at t = phi/w, wrapped into [0, P).
  const double phi = std::atan2(sin_coeff[0], cos_coeff[0]);
  double t = phi * period_hours / kTwoPi;
  t = std::fmod(t, period_hours);
  if (t < 0) t += period_hours;
  return t;
}

double CosinorFit::predict(double t_hours) const {
  double y = mesor;
  for (int i = 1; i <= components; ++i) {
    const double w = kTwoPi * i / period_hours;
    y += sin_coeff[i - 1] * std::sin(w * t_hours) +
         cos_coeff[i - 1] * std::cos(w * t_hours);
  }
  return y;
}

CosinorFit cosinor_fit(const std::vector<double>& time_hours,
                       const std::vector<double>& values, double period_hours,
                       int components) {
  if (time_hours.size() != values.size())
    throw ShapeError("time and value length mismatch");
  if (period_hours <= 0) throw ConfigError("period must be positive");
  if (components < 1) throw ConfigError("need at least one component");
  const int n = static_cast<int>(values.size());
  const int p = 2 * components + 1;
  if (n < p)
    throw DataError("insufficient points for cosinor fit: need >= " +
                    std::to_string(p));

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) {
    design(r, 0) = 1.0;
    for (int i = 1; i <= components; ++i) {
      const double w = kTwoPi * i / period_hours;
      design(r, 2 * i - 1) = std::sin(w * time_hours[r]);
      design(r, 2 * i) = std::cos(w * time_hours[r]);
    }
    y(r) = values[r];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p)
    throw DataError("rank-deficient cosinor design (collinear samples)");
  const Eigen::VectorXd beta = qr.solve(y);

  CosinorFit fit;
  fit.period_hours = period_hours;
  fit.components = components;
  fit.mesor = beta(0);
  for (int i = 1; i <= components; ++i) {
    fit.sin_coeff.push_back(beta(2 * i - 1));
    fit.cos_coeff.push_back(beta(2 * i));
  }
  fit.rss = (y - design * beta).squaredNorm();
  return fit;
}

Flagged relative_amplitude(const CosinorFit& fit) {
  if (std::fabs(fit.mesor) < 1e-9) return {0.0, true};
  return {fit.amplitude() / fit.mesor, false};
}

namespace {

double population_std(const std::vector<double>& x) {
  const double mu =
      std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double m2 = 0.0;
  for (double v : x) m2 += (v - mu) * (v - mu);
  return std::sqrt(m2 / static_cast<double>(x.size()));
}

}  // namespace

Flagged sample_entropy(const std::vector<double>& series, int m,
                       double tolerance) {
  const int n = static_cast<int>(series.size());
  if (n < m + 2) throw DataError("series too short for sample entropy");
  const int count = n - m;  // templates indexed 0..count-1 for both lengths

  std::int64_t match_m = 0, match_m1 = 0;
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      double d = 0.0;
      for (int k = 0; k < m; ++k)
        d = std::max(d, std::fabs(series[i + k] - series[j + k]));
      if (d <= tolerance) {
        ++match_m;
        if (std::fabs(series[i + m] - series[j + m]) <= tolerance) ++match_m1;
      }
    }
  }
  if (match_m == 0 || match_m1 == 0) {
    // No template matches: report the largest entropy resolvable from the
    // available pair count, flagged.
    const double pairs =
        static_cast<double>(count) * (count - 1) / 2.0;
    return {std::log(std::max(pairs, 2.0)), true};
  }
  return {-std::log(static_cast<double>(match_m1) /
                    static_cast<double>(match_m)),
          false};
}

Flagged sample_entropy_multiscale(const std::vector<double>& series,
                                  const SampleEntropyConfig& cfg) {
  if (cfg.scales.empty()) throw ConfigError("need at least one scale");
  const double tol = cfg.tolerance_factor * population_std(series);
  double sum = 0.0;
  bool degenerate = false;
  for (int tau : cfg.scales) {
    if (tau < 1) throw ConfigError("scale must be >= 1");
    std::vector<double> coarse;
    for (std::size_t i = 0; i + tau <= series.size(); i += tau) {
      double s = 0.0;
      for (int k = 0; k < tau; ++k) s += series[i + k];
      coarse.push_back(s / tau);
    }
    const Flagged e = sample_entropy(coarse, cfg.template_length, tol);
    sum += e.value;
    degenerate = degenerate || e.degenerate;
  }
  return {sum / static_cast<double>(cfg.scales.size()), degenerate};
}

RestActivity m10_l5_ra(const std::vector<double>& series,
                       double hours_per_sample, double m_hours,
                       double l_hours) {
  if (hours_per_sample <= 0) throw ConfigError("sample spacing must be > 0");
  const int n = static_cast<int>(series.size());
  const auto span_len = [&](double hours) {
    return std::max(1, static_cast<int>(std::lround(hours / hours_per_sample)));
  };
  const int km = span_len(m_hours);
  const int kl = span_len(l_hours);
  if (km > n || kl > n)
    throw DataError("series spans less than the requested window");

  const auto extreme_mean = [&](int k, bool want_max) {
    double window = std::accumulate(series.begin(), series.begin() + k, 0.0);
    double best = window;
    for (int i = k; i < n; ++i) {
      window += series[i] - series[i - k];
      best = want_max ? std::max(best, window) : std::min(best, window);
    }
    return best / static_cast<double>(k);
  };

  RestActivity out;
  out.m10 = extreme_mean(km, true);
  out.l5 = extreme_mean(kl, false);
  const double denom = out.m10 + out.l5;
  if (std::fabs(denom) < 1e-12) {
    out.ra = 0.0;
    out.degenerate = true;
  } else {
    out.ra = (out.m10 - out.l5) / denom;
  }
  return out;
}

Flagged intradaily_variability(const std::vector<double>& series) {
  const int n = static_cast<int>(series.size());
  if (n < 3) throw DataError("series too short for IV");
  const double mu =
      std::accumulate(series.begin(), series.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (int i = 1; i < n; ++i) {
    const double d = series[i] - series[i - 1];
    num += d * d;
  }
  for (double v : series) den += (v - mu) * (v - mu);
  if (den == 0.0) return {0.0, true};
  return {static_cast<double>(n) * num / (static_cast<double>(n - 1) * den),
          false};
}

const std::vector<std::string>& rhythm_param_names() {
  static const std::vector<std::string> names = {
      "mesor", "amplitude", "acrophase", "relative_amplitude", "mse",
      "m10",   "l5",        "ra",        "iv"};
  return names;
}

RhythmVector rhythm_vector(const std::vector<double>& time_hours,
                           const std::vector<double>& values,
                           double period_hours, const RhythmConfig& cfg) {
  if (time_hours.size() != values.size() || values.size() < 2)
    throw ShapeError("need matching time/value series of length >= 2");

  RhythmVector rv;
  rv.period_hours = period_hours;
  const double spacing = time_hours[1] - time_hours[0];
  const double span = time_hours.back() - time_hours.front() + spacing;
  rv.under_spanned = period_hours > span + 1e-9;

  double mesor = 0.0, amplitude = 0.0, acro = 0.0, relamp = 0.0;
  try {
    const CosinorFit fit =
        cosinor_fit(time_hours, values, period_hours, cfg.components);
    mesor = fit.mesor;
    amplitude = fit.amplitude();
    acro = fit.acrophase_hours();
    const Flagged ra = relative_amplitude(fit);
    relamp = ra.value;
    rv.any_degenerate = rv.any_degenerate || ra.degenerate;
  } catch (const DataError&) {
    rv.any_degenerate = true;  // flagged zeros keep the matrix rectangular
  }

  const Flagged mse = sample_entropy_multiscale(values, cfg.mse);
  const RestActivity rest = m10_l5_ra(values, spacing);
  const Flagged iv = intradaily_variability(values);
  rv.any_degenerate =
      rv.any_degenerate || mse.degenerate || rest.degenerate || iv.degenerate;

  rv.values = {mesor,     amplitude, acro,    relamp, mse.value,
               rest.m10,  rest.l5,   rest.ra, iv.value};
  return rv;
}

}  // namespace covidrhythm
