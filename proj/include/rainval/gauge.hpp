#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rainval/date.hpp"

namespace rainval {

// ---------------------------------------------------------------------------
// Station metadata
// ---------------------------------------------------------------------------

struct StationMeta {
  std::string station_id;  // the station name; unique within a table
  std::string name;
  std::string country;
  double latitude = 0.0;
  double longitude = 0.0;
  double elevation = 0.0;  // metres
  int period_start = 0;
  int period_end = 0;
  double completeness = 1.0;  // fraction in [0,1]
};

/// Parses the station table CSV with header
/// `country,name,latitude,longitude,elevation,start_year,end_year,complete_pct`.
/// Throws ParseError for malformed rows and ValidationError for out-of-range
/// values or duplicate station names.
std::vector<StationMeta> parse_station_table(std::string_view raw);

void validate(const StationMeta& station);

// ---------------------------------------------------------------------------
// Daily series
// ---------------------------------------------------------------------------

/// Reasons are listed in their precedence order.
enum class QcReason : std::uint8_t {
  ConsecutiveIdentical,
  ExtremeValue,
  SuspiciousDryMonth,
  NegativeValue,
  DuplicateDate,
};
inline constexpr std::size_t kQcReasonCount = 5;
inline constexpr std::array<QcReason, kQcReasonCount> kAllQcReasons = {
    QcReason::ConsecutiveIdentical, QcReason::ExtremeValue, QcReason::SuspiciousDryMonth,
    QcReason::NegativeValue, QcReason::DuplicateDate};

std::string_view to_string(QcReason reason);

/// Status of one calendar day. Flagged days keep the value that failed QC and
/// are treated as missing everywhere downstream.
struct DayStatus {
  enum class Kind : std::uint8_t { Observed, Missing, Flagged };

  Kind kind = Kind::Missing;
  double value = 0.0;  // observed or original value; 0 when missing
  QcReason reason = QcReason::ConsecutiveIdentical;  // meaningful only when flagged

  static DayStatus observed(double mm) { return {Kind::Observed, mm, {}}; }
  static DayStatus missing() { return {}; }
  static DayStatus flagged(QcReason why, double original_mm) { return {Kind::Flagged, original_mm, why}; }

  bool is_observed() const { return kind == Kind::Observed; }
  bool is_flagged() const { return kind == Kind::Flagged; }
  std::optional<double> observed_value() const {
    return is_observed() ? std::optional<double>(value) : std::nullopt;
  }

  friend bool operator==(const DayStatus&, const DayStatus&) = default;
};

/// Contiguous daily record starting at `start_date`, one entry per calendar
/// day. Raw ingested series may carry negative observed values; run_qc flags
/// them, so every series that leaves QC has only non-negative observations.
class DailySeries {
 public:
  DailySeries() = default;
  DailySeries(std::string station_id, Date start_date, std::vector<DayStatus> entries);

  /// Builds a series from optional values; nullopt becomes Missing.
  static DailySeries from_values(std::string station_id, Date start_date,
                                 const std::vector<std::optional<double>>& values);

  const std::string& station_id() const { return station_id_; }
  Date start_date() const { return start_; }
  /// Last covered date; equals start_date() - 1 for an empty series.
  Date end_date() const { return start_ + std::chrono::days{static_cast<long>(entries_.size()) - 1}; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::vector<DayStatus>& entries() const { return entries_; }
  const DayStatus& operator[](std::size_t i) const { return entries_[i]; }
  Date date_at(std::size_t i) const { return start_ + std::chrono::days{static_cast<long>(i)}; }
  std::optional<std::size_t> index_of(Date d) const;

  std::size_t observed_count() const;

  friend bool operator==(const DailySeries&, const DailySeries&) = default;

 private:
  std::string station_id_;
  Date start_{};
  std::vector<DayStatus> entries_;
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

struct SeriesParseResult {
  DailySeries series;
  std::vector<RowIssue> issues;
};

inline const std::vector<std::string>& default_missing_tokens() {
  static const std::vector<std::string> tokens{"", "NA", "NaN", "-99", "-99.9"};
  return tokens;
}

/// Parses a `date,rain_mm` CSV. Gaps are filled with Missing; both rows of a
/// duplicated date collapse into one DuplicateDate flag. Bad dates, bad
/// numbers and negative values are reported per row; negative values are kept
/// as observations for QC to flag. Throws ParseError when the header is wrong
/// or no row carries a valid date.
SeriesParseResult parse_daily_series(std::string_view raw, std::string station_id,
                                     const std::vector<std::string>& missing_tokens = default_missing_tokens());

// ---------------------------------------------------------------------------
// Quality control
// ---------------------------------------------------------------------------

struct QcConfig {
  int min_run = 5;
  double min_value = 1.0;
  double max_daily = 400.0;
  std::set<int> wet_months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  double dry_month_floor = 50.0;
  int min_station_years = 5;
  double eligibility = 0.70;
  std::optional<Date> analysis_start;
  std::optional<Date> analysis_end;

  void validate() const;
};

struct QcReport {
  std::string station_id;
  std::array<std::size_t, kQcReasonCount> counts{};
  std::size_t n_days = 0;  // days in the analysis period
  double completeness_before = 0.0;
  double completeness_after = 0.0;
  bool eligible = false;

  std::size_t count(QcReason r) const { return counts[static_cast<std::size_t>(r)]; }
  std::size_t total_flagged() const;

  /// Stable JSON rendering; identical reports give identical text.
  std::string to_json() const;
};

DailySeries qc_consecutive_identical(const DailySeries& series, int min_run, double min_value);
DailySeries qc_extremes(const DailySeries& series, double max_daily);
DailySeries qc_dry_month(const DailySeries& series, const std::set<int>& wet_months, int min_station_years,
                         double climatology_floor = 50.0);

struct QcResult {
  DailySeries series;
  QcReport report;
};

/// Applies extremes/negatives, then repeated identical values, then dry
/// months, and scores station eligibility over the analysis period.
QcResult run_qc(const DailySeries& series, const QcConfig& config = {});

/// Fraction of days in [start, end] holding an observation. Days outside the
/// series count as missing.
double observed_fraction(const DailySeries& series, Date start, Date end);

}  // namespace rainval
