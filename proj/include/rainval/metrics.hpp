#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>

#include <Eigen/Core>

#include "rainval/gauge.hpp"
#include "rainval/pairing.hpp"
#include "rainval/score.hpp"

namespace rainval {

// ---------------------------------------------------------------------------
// Continuous scores. `sim` is the product (S), `obs` the gauge (O). Both
// arguments may be any Eigen dense expression of equal length.
// ---------------------------------------------------------------------------

namespace metrics_detail {

template <typename S, typename O>
void check_lengths(const Eigen::DenseBase<S>& sim, const Eigen::DenseBase<O>& obs) {
  if (sim.size() != obs.size()) throw std::invalid_argument("metric inputs differ in length");
}

template <typename D>
bool is_constant(const Eigen::DenseBase<D>& x) {
  return x.size() == 0 || x.maxCoeff() == x.minCoeff();
}

template <typename D>
Eigen::ArrayXd as_double(const Eigen::DenseBase<D>& x) {
  return x.derived().template cast<double>().array();
}

}  // namespace metrics_detail

/// Average of S - O; positive means the product overestimates.
template <typename S, typename O>
Score mean_error(const Eigen::DenseBase<S>& sim, const Eigen::DenseBase<O>& obs) {
  metrics_detail::check_lengths(sim, obs);
  if (obs.size() == 0) return Score::absent("empty");
  using metrics_detail::as_double;
  return Score::of((as_double(sim) - as_double(obs)).sum() / static_cast<double>(obs.size()));
}

/// 100 * sum(S - O) / sum(O).
template <typename S, typename O>
Score pbias(const Eigen::DenseBase<S>& sim, const Eigen::DenseBase<O>& obs) {
  metrics_detail::check_lengths(sim, obs);
  if (obs.size() == 0) return Score::absent("empty");
  using metrics_detail::as_double;
  const double obs_total = as_double(obs).sum();
  if (!(obs_total > 0.0)) return Score::absent("zero_observed_total");
  return Score::of(100.0 * (as_double(sim) - as_double(obs)).sum() / obs_total);
}

/// Product-moment correlation, clamped to [-1, 1].
template <typename S, typename O>
Score pearson_r(const Eigen::DenseBase<S>& sim, const Eigen::DenseBase<O>& obs) {
  metrics_detail::check_lengths(sim, obs);
  if (obs.size() < 2) return Score::absent("too_few_pairs");
  if (metrics_detail::is_constant(sim) || metrics_detail::is_constant(obs)) return Score::absent("zero_variance");
  using metrics_detail::as_double;
  const Eigen::ArrayXd s = as_double(sim) - as_double(sim).mean();
  const Eigen::ArrayXd o = as_double(obs) - as_double(obs).mean();
  const double r = (s * o).sum() / std::sqrt(s.square().sum() * o.square().sum());
  return Score::of(std::clamp(r, -1.0, 1.0));
}

/// Ratio of sample standard deviations (divisor N-1), sigma_S / sigma_O.
template <typename S, typename O>
Score rsd(const Eigen::DenseBase<S>& sim, const Eigen::DenseBase<O>& obs) {
  metrics_detail::check_lengths(sim, obs);
  if (obs.size() < 2) return Score::absent("too_few_pairs");
  if (metrics_detail::is_constant(obs)) return Score::absent("zero_observed_variance");
  if (metrics_detail::is_constant(sim)) return Score::of(0.0);
  using metrics_detail::as_double;
  const double ss = (as_double(sim) - as_double(sim).mean()).square().sum();
  const double so = (as_double(obs) - as_double(obs).mean()).square().sum();
  return Score::of(std::sqrt(ss / so));
}

struct ContinuousScores {
  std::size_t n = 0;
  Score me;
  Score pbias;
  Score r;
  Score rsd;
};

template <typename S, typename O>
ContinuousScores continuous_scores(const Eigen::DenseBase<S>& sim, const Eigen::DenseBase<O>& obs) {
  return {static_cast<std::size_t>(obs.size()), mean_error(sim, obs), pbias(sim, obs), pearson_r(sim, obs),
          rsd(sim, obs)};
}

/// Scores of one annual summary kind; every metric is absent with reason
/// "insufficient_data" when fewer than two joint years exist.
ContinuousScores score_annual(const AnnualComparison& comparison);

// ---------------------------------------------------------------------------
// Intensity categories and detection
// ---------------------------------------------------------------------------

enum class IntensityCategory { Dry = 0, Light, Moderate, Heavy, Violent };
inline constexpr std::size_t kCategoryCount = 5;
inline constexpr std::array<IntensityCategory, kCategoryCount> kAllCategories = {
    IntensityCategory::Dry, IntensityCategory::Light, IntensityCategory::Moderate, IntensityCategory::Heavy,
    IntensityCategory::Violent};

/// Lower bounds (mm) of Light, Moderate, Heavy and Violent.
inline constexpr std::array<double, 4> kCategoryLowerBounds = {0.85, 5.0, 20.0, 40.0};

std::string_view to_string(IntensityCategory c);

inline std::size_t index(IntensityCategory c) { return static_cast<std::size_t>(c); }

/// Each boundary value belongs to the upper class. Throws std::domain_error
/// for negative or non-finite input.
IntensityCategory classify_intensity(double mm);

template <typename T>
using CategoryMap = std::array<std::optional<T>, kCategoryCount>;

struct ContingencyTable {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  std::size_t correct_negatives = 0;

  std::size_t total() const { return hits + misses + false_alarms + correct_negatives; }
  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Cells divided by the number of paired days.
struct ContingencyFractions {
  double hits = 0.0;
  double misses = 0.0;
  double false_alarms = 0.0;
  double correct_negatives = 0.0;
};

/// A day is an event when its value is >= threshold.
ContingencyTable rain_day_contingency(const Eigen::Ref<const Eigen::VectorXd>& gauge,
                                      const Eigen::Ref<const Eigen::VectorXd>& product,
                                      double threshold = kDefaultRainDayThreshold);
ContingencyTable rain_day_contingency(const PairedDailySeries& pairs, double threshold = kDefaultRainDayThreshold);

std::optional<ContingencyFractions> fractions(const ContingencyTable& table);

/// hits / (hits + misses).
Score pod(const ContingencyTable& table);

/// Per observed category, the share of its days on which the product falls
/// in the same category. Categories never observed are absent.
CategoryMap<double> category_pod(const Eigen::Ref<const Eigen::VectorXd>& gauge,
                                 const Eigen::Ref<const Eigen::VectorXd>& product);
CategoryMap<double> category_pod(const PairedDailySeries& pairs);

/// How the product classified the days of one observed category.
struct OutcomeRow {
  std::size_t n_observed = 0;
  double true_hit = 0.0;   // same category
  double true_miss = 0.0;  // product dry while a non-dry category was observed
  double lower = 0.0;      // a lower non-dry category
  double higher = 0.0;     // a higher category
};

using CategoryOutcome = CategoryMap<OutcomeRow>;

CategoryOutcome category_outcome_decomposition(const Eigen::Ref<const Eigen::VectorXd>& gauge,
                                               const Eigen::Ref<const Eigen::VectorXd>& product);
CategoryOutcome category_outcome_decomposition(const PairedDailySeries& pairs);

/// Percentages of the non-dry categories among observed rain days. Dry is
/// always absent; nullopt when the series has no rain day.
std::optional<CategoryMap<double>> observed_category_distribution(const DailySeries& series);

}  // namespace rainval
