#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rainval/date.hpp"
#include "rainval/gauge.hpp"
#include "rainval/pairing.hpp"

namespace rainval {

inline constexpr int kSeasonLength = 365;
inline constexpr int kDefaultHarmonics = 3;

/// Day of the accounting year in [1, 365]; the first day of the convention's
/// start month is 1 and 29 February shares the index of 28 February.
int day_of_cycle(Date d, YearConvention convention);

/// Rain-day indicator per observed day: 1 when the value is >= threshold.
struct BinaryOccurrenceSeries {
  std::vector<int> day_index;
  std::vector<std::uint8_t> outcome;
  double threshold = kDefaultRainDayThreshold;
  YearConvention convention;

  std::size_t size() const { return outcome.size(); }
};

BinaryOccurrenceSeries binarize(const DailySeries& series, double threshold, YearConvention convention = {});
BinaryOccurrenceSeries binarize(std::span<const Date> dates, const Eigen::Ref<const Eigen::VectorXd>& values,
                                double threshold, YearConvention convention = {});

/// [1, cos(2 pi t/p), sin(2 pi t/p), ..., cos(2 pi k t/p), sin(2 pi k t/p)].
Eigen::VectorXd design_row(double t, int k, double period = kSeasonLength);

/// Logistic-link harmonic occurrence model
///   logit p(t) = beta0 + sum_i A_i cos(2 pi i t/p) + B_i sin(2 pi i t/p).
struct HarmonicModel {
  int k = kDefaultHarmonics;
  double period = kSeasonLength;
  double beta0 = 0.0;
  Eigen::VectorXd a;  // A_1..A_k
  Eigen::VectorXd b;  // B_1..B_k
  bool converged = false;
  double deviance = 0.0;
  std::size_t n_obs = 0;
  int iterations = 0;
  std::string note;                    // reason when not converged
  std::vector<double> deviance_trace;  // deviance after each accepted step

  /// Coefficients in design_row order.
  Eigen::VectorXd coefficients() const;
};

struct FitOptions {
  double tolerance = 1e-8;  // on |change in deviance|
  int max_iterations = 100;
  double ridge = 1e-8;  // added to the diagonal of the normal equations
  double separation_norm = 30.0;
};

/// Maximum-likelihood Bernoulli GLM by iteratively reweighted least squares
/// with step halving. Throws FitError when only one outcome class is present
/// or when there are fewer than 10 observations per coefficient.
HarmonicModel fit_occurrence(const BinaryOccurrenceSeries& series, int k = kDefaultHarmonics,
                             const FitOptions& options = {});

/// Bernoulli deviance of arbitrary coefficients on a series.
double occurrence_deviance(const BinaryOccurrenceSeries& series, const Eigen::Ref<const Eigen::VectorXd>& coefficients,
                           int k, double period = kSeasonLength);

/// Fitted probability at day t; periodic in t and kept within
/// [1e-15, 1 - 1e-15].
double predict_occurrence(const HarmonicModel& model, double t);

/// Mean over t = 1..365 of |p_a(t) - p_b(t)|.
double curve_distance(const HarmonicModel& a, const HarmonicModel& b);

struct SweepRow {
  double threshold = 0.0;
  std::optional<HarmonicModel> model;
  std::optional<double> curve_distance;
  std::string error;  // set when the fit failed
};

struct SweepResult {
  double gauge_threshold = kDefaultRainDayThreshold;
  std::optional<HarmonicModel> gauge_model;
  std::string gauge_error;
  std::vector<SweepRow> rows;  // ascending threshold
  std::optional<double> best_threshold;
  std::size_t n_paired_days = 0;
};

/// Fits the gauge once at `gauge_threshold` and the product at every
/// threshold, both on the days where both sources are observed. A failed fit
/// is recorded in its row and does not stop the sweep. The best threshold is
/// the one with the smallest curve distance (smallest threshold on ties).
SweepResult threshold_sweep(const DailySeries& product, const DailySeries& gauge, std::span<const double> thresholds,
                            int k = kDefaultHarmonics, YearConvention convention = {},
                            double gauge_threshold = kDefaultRainDayThreshold);
SweepResult threshold_sweep(const PairedDailySeries& pairs, std::span<const double> thresholds,
                            int k = kDefaultHarmonics, YearConvention convention = {},
                            double gauge_threshold = kDefaultRainDayThreshold);

}  // namespace rainval
