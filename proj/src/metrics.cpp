#include "rainval/metrics.hpp"

#include <fmt/format.h>

namespace rainval {

ContinuousScores score_annual(const AnnualComparison& comparison) {
  if (!comparison.sufficient()) {
    auto none = Score::absent("insufficient_data");
    return {comparison.years.size(), none, none, none, none};
  }
  return continuous_scores(comparison.product, comparison.gauge);
}

std::string_view to_string(IntensityCategory c) {
  switch (c) {
    case IntensityCategory::Dry: return "dry";
    case IntensityCategory::Light: return "light";
    case IntensityCategory::Moderate: return "moderate";
    case IntensityCategory::Heavy: return "heavy";
    case IntensityCategory::Violent: return "violent";
  }
  return "dry";
}

IntensityCategory classify_intensity(double mm) {
  if (!(mm >= 0.0) || !std::isfinite(mm))
    throw std::domain_error(fmt::format("cannot classify rainfall {} mm", mm));
  std::size_t k = 0;
  while (k < kCategoryLowerBounds.size() && mm >= kCategoryLowerBounds[k]) ++k;
  return static_cast<IntensityCategory>(k);
}

namespace {

void require_same_length(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("gauge and product differ in length");
}

}  // namespace

ContingencyTable rain_day_contingency(const Eigen::Ref<const Eigen::VectorXd>& gauge,
                                      const Eigen::Ref<const Eigen::VectorXd>& product, double threshold) {
  require_same_length(gauge, product);
  if (!(threshold > 0.0)) throw std::invalid_argument("rain-day threshold must be positive");
  ContingencyTable t;
  for (Eigen::Index i = 0; i < gauge.size(); ++i) {
    const bool obs = gauge[i] >= threshold;
    const bool est = product[i] >= threshold;
    if (obs && est)
      ++t.hits;
    else if (obs)
      ++t.misses;
    else if (est)
      ++t.false_alarms;
    else
      ++t.correct_negatives;
  }
  return t;
}

ContingencyTable rain_day_contingency(const PairedDailySeries& pairs, double threshold) {
  return rain_day_contingency(pairs.gauge_values(), pairs.product_values(), threshold);
}

std::optional<ContingencyFractions> fractions(const ContingencyTable& t) {
  const auto n = static_cast<double>(t.total());
  if (t.total() == 0) return std::nullopt;
  return ContingencyFractions{t.hits / n, t.misses / n, t.false_alarms / n, t.correct_negatives / n};
}

Score pod(const ContingencyTable& t) {
  const std::size_t events = t.hits + t.misses;
  if (events == 0) return Score::absent("no_observed_events");
  return Score::of(static_cast<double>(t.hits) / static_cast<double>(events));
}

CategoryMap<double> category_pod(const Eigen::Ref<const Eigen::VectorXd>& gauge,
                                 const Eigen::Ref<const Eigen::VectorXd>& product) {
  require_same_length(gauge, product);
  std::array<std::size_t, kCategoryCount> observed{}, agreed{};
  for (Eigen::Index i = 0; i < gauge.size(); ++i) {
    const auto o = index(classify_intensity(gauge[i]));
    ++observed[o];
    if (index(classify_intensity(product[i])) == o) ++agreed[o];
  }
  CategoryMap<double> out;
  for (std::size_t c = 0; c < kCategoryCount; ++c)
    if (observed[c] > 0) out[c] = static_cast<double>(agreed[c]) / static_cast<double>(observed[c]);
  return out;
}

CategoryMap<double> category_pod(const PairedDailySeries& pairs) {
  return category_pod(pairs.gauge_values(), pairs.product_values());
}

CategoryOutcome category_outcome_decomposition(const Eigen::Ref<const Eigen::VectorXd>& gauge,
                                               const Eigen::Ref<const Eigen::VectorXd>& product) {
  require_same_length(gauge, product);
  // counts[obs][outcome]: 0 hit, 1 miss, 2 lower, 3 higher
  std::array<std::array<std::size_t, 4>, kCategoryCount> counts{};
  std::array<std::size_t, kCategoryCount> n{};
  for (Eigen::Index i = 0; i < gauge.size(); ++i) {
    const auto o = index(classify_intensity(gauge[i]));
    const auto p = index(classify_intensity(product[i]));
    ++n[o];
    if (p == o)
      ++counts[o][0];
    else if (p == 0)
      ++counts[o][1];
    else if (p < o)
      ++counts[o][2];
    else
      ++counts[o][3];
  }
  CategoryOutcome out;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (n[c] == 0) continue;
    const auto total = static_cast<double>(n[c]);
    OutcomeRow row;
    row.n_observed = n[c];
    row.true_hit = counts[c][0] / total;
    row.true_miss = counts[c][1] / total;
    row.lower = counts[c][2] / total;
    row.higher = counts[c][3] / total;
    out[c] = row;
  }
  return out;
}

CategoryOutcome category_outcome_decomposition(const PairedDailySeries& pairs) {
  return category_outcome_decomposition(pairs.gauge_values(), pairs.product_values());
}

std::optional<CategoryMap<double>> observed_category_distribution(const DailySeries& series) {
  std::array<std::size_t, kCategoryCount> counts{};
  std::size_t rain_days = 0;
  for (const auto& e : series.entries()) {
    if (!e.is_observed()) continue;
    const auto c = index(classify_intensity(e.value));
    if (c == 0) continue;
    ++counts[c];
    ++rain_days;
  }
  if (rain_days == 0) return std::nullopt;
  CategoryMap<double> out;
  for (std::size_t c = 1; c < kCategoryCount; ++c)
    out[c] = 100.0 * static_cast<double>(counts[c]) / static_cast<double>(rain_days);
  return out;
}

}  // namespace rainval
