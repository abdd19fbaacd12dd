#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rainval/date.hpp"
#include "rainval/gauge.hpp"

namespace rainval {

struct PairedDay {
  Date date;
  double gauge_mm = 0.0;
  double product_mm = 0.0;
};

/// Days on which both the gauge and the product hold an observation.
struct PairedDailySeries {
  std::string station_id;
  std::string product_id;
  std::vector<PairedDay> days;

  std::size_t size() const { return days.size(); }
  bool empty() const { return days.empty(); }
  Eigen::VectorXd gauge_values() const;
  Eigen::VectorXd product_values() const;
  std::vector<Date> dates() const;
};

PairedDailySeries align(const DailySeries& gauge, const DailySeries& product, std::string product_id = {});

/// Accounting year starting on the first day of `start_month`
/// (1 = calendar year, 8 = August-July water year).
struct YearConvention {
  int start_month = 1;
};

/// Label of the accounting year containing `d`: the calendar year in which
/// that accounting year starts.
int assign_year(Date d, YearConvention convention);

/// First and last date of the accounting year with the given label.
Date year_start(int label, YearConvention convention);
Date year_end(int label, YearConvention convention);

struct AnnualSummary {
  int year_label = 0;
  double total_rain = 0.0;
  int rain_days = 0;
  std::optional<double> mean_rain_per_rain_day;
  int n_valid_days = 0;
  bool valid = false;
};

inline constexpr double kDefaultRainDayThreshold = 0.85;
inline constexpr int kDefaultMinValidDays = 355;

/// One summary per accounting year touched by the series. Totals add observed
/// values only; a year is valid when it has at least `min_days` observations.
std::vector<AnnualSummary> annual_summaries(const DailySeries& series, double threshold = kDefaultRainDayThreshold,
                                            YearConvention convention = {}, int min_days = kDefaultMinValidDays);

enum class SummaryKind { Total, RainDays, MeanPerRainDay };
inline constexpr std::array<SummaryKind, 3> kAllSummaryKinds = {SummaryKind::Total, SummaryKind::RainDays,
                                                                SummaryKind::MeanPerRainDay};
std::string_view to_string(SummaryKind kind);

/// Year-aligned gauge and product values of one summary kind.
struct AnnualComparison {
  SummaryKind kind = SummaryKind::Total;
  std::vector<int> years;
  Eigen::VectorXd gauge;
  Eigen::VectorXd product;

  bool sufficient() const { return years.size() >= 2; }
};

enum class YearScreening {
  Symmetric,  // a year must be valid in both sources
  GaugeOnly,  // only the gauge year must be valid
};

/// Inner join on year label. Mean-per-rain-day drops years where either side
/// has no rain days.
std::array<AnnualComparison, 3> paired_annual(const std::vector<AnnualSummary>& gauge,
                                              const std::vector<AnnualSummary>& product,
                                              YearScreening screening = YearScreening::Symmetric);

}  // namespace rainval
