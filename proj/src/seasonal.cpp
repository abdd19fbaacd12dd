#include "rainval/seasonal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "rainval/errors.hpp"

namespace rainval {

namespace {

// Day-of-year of the first of each month in a 365-day year.
constexpr std::array<int, 13> kMonthOffset = {0, 0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334};

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Binary outcomes collapsed to (trials, successes) per day index. Identical
/// design rows make the binomial and Bernoulli likelihoods equal.
struct DayCounts {
  Eigen::VectorXd t;
  Eigen::ArrayXd trials;
  Eigen::ArrayXd successes;
};

DayCounts aggregate(const BinaryOccurrenceSeries& s, double period) {
  const int p = static_cast<int>(period);
  std::vector<double> n(static_cast<std::size_t>(p) + 1, 0.0), y(static_cast<std::size_t>(p) + 1, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int t = s.day_index[i];
    if (t < 1 || t > p) throw std::out_of_range(fmt::format("day index {} outside [1, {}]", t, p));
    n[static_cast<std::size_t>(t)] += 1.0;
    y[static_cast<std::size_t>(t)] += s.outcome[i];
  }
  Eigen::Index rows = 0;
  for (int t = 1; t <= p; ++t) rows += n[static_cast<std::size_t>(t)] > 0.0;
  DayCounts c{Eigen::VectorXd(rows), Eigen::ArrayXd(rows), Eigen::ArrayXd(rows)};
  Eigen::Index r = 0;
  for (int t = 1; t <= p; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (n[ti] == 0.0) continue;
    c.t[r] = t;
    c.trials[r] = n[ti];
    c.successes[r] = y[ti];
    ++r;
  }
  return c;
}

Eigen::MatrixXd design_matrix(const Eigen::VectorXd& t, int k, double period) {
  Eigen::MatrixXd x(t.size(), 2 * k + 1);
  for (Eigen::Index i = 0; i < t.size(); ++i) x.row(i) = design_row(t[i], k, period).transpose();
  return x;
}

double deviance_of(const Eigen::VectorXd& eta, const DayCounts& c) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    dev += c.successes[i] * softplus(-eta[i]) + (c.trials[i] - c.successes[i]) * softplus(eta[i]);
  return 2.0 * dev;
}

HarmonicModel unpack(const Eigen::VectorXd& beta, int k, double period) {
  HarmonicModel m;
  m.k = k;
  m.period = period;
  m.beta0 = beta[0];
  m.a.resize(k);
  m.b.resize(k);
  for (int i = 0; i < k; ++i) {
    m.a[i] = beta[1 + 2 * i];
    m.b[i] = beta[2 + 2 * i];
  }
  return m;
}

}  // namespace

int day_of_cycle(Date d, YearConvention convention) {
  const auto m = static_cast<int>(month_of(d));
  const auto day = std::min(static_cast<int>(day_of(d)), m == 2 ? 28 : 31);
  const int ordinal = kMonthOffset[static_cast<std::size_t>(m)] + day;
  const int origin = kMonthOffset[static_cast<std::size_t>(convention.start_month)] + 1;
  return (ordinal - origin + kSeasonLength) % kSeasonLength + 1;
}

BinaryOccurrenceSeries binarize(const DailySeries& series, double threshold, YearConvention convention) {
  if (!(threshold > 0.0)) throw std::invalid_argument("rain-day threshold must be positive");
  BinaryOccurrenceSeries out;
  out.threshold = threshold;
  out.convention = convention;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series[i].is_observed()) continue;
    out.day_index.push_back(day_of_cycle(series.date_at(i), convention));
    out.outcome.push_back(series[i].value >= threshold ? 1 : 0);
  }
  return out;
}

BinaryOccurrenceSeries binarize(std::span<const Date> dates, const Eigen::Ref<const Eigen::VectorXd>& values,
                                double threshold, YearConvention convention) {
  if (!(threshold > 0.0)) throw std::invalid_argument("rain-day threshold must be positive");
  if (dates.size() != static_cast<std::size_t>(values.size()))
    throw std::invalid_argument("dates and values differ in length");
  BinaryOccurrenceSeries out;
  out.threshold = threshold;
  out.convention = convention;
  out.day_index.reserve(dates.size());
  out.outcome.reserve(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out.day_index.push_back(day_of_cycle(dates[i], convention));
    out.outcome.push_back(values[static_cast<Eigen::Index>(i)] >= threshold ? 1 : 0);
  }
  return out;
}

Eigen::VectorXd design_row(double t, int k, double period) {
  Eigen::VectorXd row(2 * k + 1);
  row[0] = 1.0;
  for (int i = 1; i <= k; ++i) {
    const double w = 2.0 * std::numbers::pi * i * t / period;
    row[2 * i - 1] = std::cos(w);
    row[2 * i] = std::sin(w);
  }
  return row;
}

Eigen::VectorXd HarmonicModel::coefficients() const {
  Eigen::VectorXd beta(2 * k + 1);
  beta[0] = beta0;
  for (int i = 0; i < k; ++i) {
    beta[1 + 2 * i] = a[i];
    beta[2 + 2 * i] = b[i];
  }
  return beta;
}

double occurrence_deviance(const BinaryOccurrenceSeries& series, const Eigen::Ref<const Eigen::VectorXd>& coefficients,
                           int k, double period) {
  const auto counts = aggregate(series, period);
  const Eigen::VectorXd eta = design_matrix(counts.t, k, period) * coefficients;
  return deviance_of(eta, counts);
}

HarmonicModel fit_occurrence(const BinaryOccurrenceSeries& series, int k, const FitOptions& options) {
  if (k < 0) throw std::invalid_argument("harmonic count must be non-negative");
  const auto n_coef = 2 * k + 1;
  const std::size_t n = series.size();
  if (n < static_cast<std::size_t>(10 * n_coef))
    throw FitError(fmt::format("insufficient observations: {} < {}", n, 10 * n_coef));
  std::size_t wet = 0;
  for (auto y : series.outcome) wet += y;
  if (wet == 0 || wet == n) throw FitError("degenerate occurrence");

  const double period = kSeasonLength;
  const auto counts = aggregate(series, period);
  const Eigen::MatrixXd x = design_matrix(counts.t, k, period);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n_coef);
  const double ybar = static_cast<double>(wet) / static_cast<double>(n);
  beta[0] = std::log(ybar / (1.0 - ybar));
  Eigen::VectorXd eta = x * beta;
  double dev = deviance_of(eta, counts);

  std::vector<double> trace;
  bool converged = false;
  std::string note;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::ArrayXd mu = eta.unaryExpr([](double v) { return logistic(v); }).array();
    const Eigen::ArrayXd w = counts.trials * mu * (1.0 - mu);
    const Eigen::VectorXd grad = x.transpose() * (counts.successes - counts.trials * mu).matrix();
    Eigen::MatrixXd h = x.transpose() * w.matrix().asDiagonal() * x;
    h.diagonal().array() += options.ridge;
    const Eigen::VectorXd step = h.ldlt().solve(grad);

    double scale = 1.0;
    Eigen::VectorXd trial = beta + step;
    Eigen::VectorXd trial_eta = x * trial;
    double trial_dev = deviance_of(trial_eta, counts);
    for (int halvings = 0; !(trial_dev <= dev) && halvings < 40; ++halvings) {
      scale /= 2.0;
      trial = beta + scale * step;
      trial_eta = x * trial;
      trial_dev = deviance_of(trial_eta, counts);
    }
    if (!(trial_dev <= dev)) {  // no descent left at machine precision
      trial = beta;
      trial_eta = eta;
      trial_dev = dev;
    }
    if (trial_dev > dev) throw InvariantError("IRLS deviance increased");

    const double change = dev - trial_dev;
    beta = trial;
    eta = trial_eta;
    dev = trial_dev;
    trace.push_back(dev);

    if (beta.norm() > options.separation_norm) {
      note = fmt::format("separation: coefficient norm {:.3g} exceeds {:.3g}", beta.norm(), options.separation_norm);
      ++it;
      break;
    }
    if (std::abs(change) < options.tolerance) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged && note.empty()) note = fmt::format("no convergence after {} iterations", options.max_iterations);

  auto model = unpack(beta, k, period);
  model.converged = converged && beta.allFinite();
  model.deviance = dev;
  model.n_obs = n;
  model.iterations = it;
  model.note = converged ? std::string{} : note;
  model.deviance_trace = std::move(trace);
  return model;
}

double predict_occurrence(const HarmonicModel& model, double t) {
  double phase = std::fmod(t, model.period);
  if (phase < 0.0) phase += model.period;
  const double eta = design_row(phase, model.k, model.period).dot(model.coefficients());
  return std::clamp(logistic(eta), 1e-15, 1.0 - 1e-15);
}

double curve_distance(const HarmonicModel& a, const HarmonicModel& b) {
  double sum = 0.0;
  for (int t = 1; t <= kSeasonLength; ++t) sum += std::abs(predict_occurrence(a, t) - predict_occurrence(b, t));
  return sum / kSeasonLength;
}

SweepResult threshold_sweep(const PairedDailySeries& pairs, std::span<const double> thresholds, int k,
                            YearConvention convention, double gauge_threshold) {
  if (thresholds.empty()) throw std::invalid_argument("threshold sweep needs at least one threshold");
  SweepResult out;
  out.gauge_threshold = gauge_threshold;
  out.n_paired_days = pairs.size();

  const auto dates = pairs.dates();
  const Eigen::VectorXd gauge = pairs.gauge_values();
  const Eigen::VectorXd product = pairs.product_values();
  try {
    out.gauge_model = fit_occurrence(binarize(dates, gauge, gauge_threshold, convention), k);
  } catch (const FitError& e) {
    out.gauge_error = e.what();
  }

  std::vector<double> sorted(thresholds.begin(), thresholds.end());
  std::sort(sorted.begin(), sorted.end());
  double best_distance = 0.0;
  for (double tr : sorted) {
    SweepRow row;
    row.threshold = tr;
    try {
      row.model = fit_occurrence(binarize(dates, product, tr, convention), k);
      if (out.gauge_model) row.curve_distance = curve_distance(*out.gauge_model, *row.model);
    } catch (const FitError& e) {
      row.error = e.what();
    }
    if (row.curve_distance && (!out.best_threshold || *row.curve_distance < best_distance)) {
      out.best_threshold = tr;
      best_distance = *row.curve_distance;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

SweepResult threshold_sweep(const DailySeries& product, const DailySeries& gauge, std::span<const double> thresholds,
                            int k, YearConvention convention, double gauge_threshold) {
  return threshold_sweep(align(gauge, product), thresholds, k, convention, gauge_threshold);
}

}  // namespace rainval
