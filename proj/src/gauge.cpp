#include "rainval/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "rainval/errors.hpp"

namespace rainval {

using detail::parse_double;
using detail::parse_int;
using detail::split_csv;
using detail::split_lines;
using detail::trim;

// ---------------------------------------------------------------------------
// Station table
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kStationHeader =
    "country,name,latitude,longitude,elevation,start_year,end_year,complete_pct";

std::string joined_header(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

}  // namespace

void validate(const StationMeta& s) {
  if (s.station_id.empty()) throw ValidationError("station has an empty name");
  if (!(s.latitude >= -90.0 && s.latitude <= 90.0))
    throw ValidationError(fmt::format("station {}: latitude {} outside [-90,90]", s.station_id, s.latitude));
  if (!(s.longitude >= -180.0 && s.longitude <= 180.0))
    throw ValidationError(fmt::format("station {}: longitude {} outside [-180,180]", s.station_id, s.longitude));
  if (!(s.elevation >= -430.0))
    throw ValidationError(fmt::format("station {}: elevation {} below -430 m", s.station_id, s.elevation));
  if (s.period_start > s.period_end)
    throw ValidationError(fmt::format("station {}: period {}-{} is reversed", s.station_id, s.period_start,
                                      s.period_end));
  if (!(s.completeness >= 0.0 && s.completeness <= 1.0))
    throw ValidationError(fmt::format("station {}: completeness {} outside [0,1]", s.station_id, s.completeness));
}

std::vector<StationMeta> parse_station_table(std::string_view raw) {
  auto lines = split_lines(raw);
  if (lines.empty()) throw ParseError("station table is empty", 1);
  if (joined_header(split_csv(lines[0])) != kStationHeader)
    throw ParseError(fmt::format("station table header must be '{}'", kStationHeader), 1);

  std::vector<StationMeta> out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    auto f = split_csv(lines[i]);
    if (f.size() != 8)
      throw ParseError(fmt::format("line {}: expected 8 fields, found {}", line_no, f.size()), line_no,
                       std::min<std::size_t>(f.size(), 8) + 1);

    auto real = [&](std::size_t col, const char* what) {
      double v = 0.0;
      if (!parse_double(f[col], v) || !std::isfinite(v))
        throw ParseError(fmt::format("line {}, column {}: {} '{}' is not a number", line_no, col + 1, what, f[col]),
                         line_no, col + 1);
      return v;
    };
    auto integer = [&](std::size_t col, const char* what) {
      int v = 0;
      if (!parse_int(f[col], v))
        throw ParseError(fmt::format("line {}, column {}: {} '{}' is not an integer", line_no, col + 1, what, f[col]),
                         line_no, col + 1);
      return v;
    };

    StationMeta s;
    s.country = f[0];
    s.name = f[1];
    s.station_id = f[1];
    if (s.name.empty()) throw ParseError(fmt::format("line {}, column 2: empty station name", line_no), line_no, 2);
    s.latitude = real(2, "latitude");
    s.longitude = real(3, "longitude");
    s.elevation = real(4, "elevation");
    s.period_start = integer(5, "start_year");
    s.period_end = integer(6, "end_year");
    s.completeness = real(7, "complete_pct") / 100.0;
    try {
      validate(s);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (!seen.insert(s.station_id).second)
      throw ValidationError(fmt::format("line {}: duplicate station '{}'", line_no, s.station_id));
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Daily series
// ---------------------------------------------------------------------------

std::string_view to_string(QcReason reason) {
  switch (reason) {
    case QcReason::ConsecutiveIdentical: return "consecutive_identical";
    case QcReason::ExtremeValue: return "extreme_value";
    case QcReason::SuspiciousDryMonth: return "suspicious_dry_month";
    case QcReason::NegativeValue: return "negative_value";
    case QcReason::DuplicateDate: return "duplicate_date";
  }
  return "unknown";
}

DailySeries::DailySeries(std::string station_id, Date start_date, std::vector<DayStatus> entries)
    : station_id_(std::move(station_id)), start_(start_date), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.kind == DayStatus::Kind::Missing && e.value != 0.0)
      throw ValidationError("missing day carries a value");
    if (e.kind != DayStatus::Kind::Missing && !std::isfinite(e.value))
      throw ValidationError("non-finite rainfall value in series " + station_id_);
  }
}

DailySeries DailySeries::from_values(std::string station_id, Date start_date,
                                     const std::vector<std::optional<double>>& values) {
  std::vector<DayStatus> entries;
  entries.reserve(values.size());
  for (const auto& v : values) entries.push_back(v ? DayStatus::observed(*v) : DayStatus::missing());
  return DailySeries(std::move(station_id), start_date, std::move(entries));
}

std::optional<std::size_t> DailySeries::index_of(Date d) const {
  auto offset = days_between(start_, d);
  if (offset < 0 || static_cast<std::size_t>(offset) >= entries_.size()) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

std::size_t DailySeries::observed_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const DayStatus& e) { return e.is_observed(); }));
}

SeriesParseResult parse_daily_series(std::string_view raw, std::string station_id,
                                     const std::vector<std::string>& missing_tokens) {
  auto lines = split_lines(raw);
  if (lines.empty()) throw ParseError("daily series is empty", 1);
  if (joined_header(split_csv(lines[0])) != "date,rain_mm")
    throw ParseError("daily series header must be 'date,rain_mm'", 1);

  struct Slot {
    int rows = 0;
    DayStatus first;
  };
  std::map<Date, Slot> rows;
  std::vector<RowIssue> issues;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    auto f = split_csv(lines[i]);
    if (f.size() != 2) {
      issues.push_back({line_no, fmt::format("expected 2 fields, found {}", f.size())});
      continue;
    }
    auto date = parse_iso_date(f[0]);
    if (!date) {
      issues.push_back({line_no, fmt::format("unparseable date '{}'", f[0])});
      continue;
    }
    DayStatus status = DayStatus::missing();
    if (std::find(missing_tokens.begin(), missing_tokens.end(), f[1]) == missing_tokens.end()) {
      double v = 0.0;
      if (!parse_double(f[1], v) || !std::isfinite(v)) {
        issues.push_back({line_no, fmt::format("unparseable value '{}'", f[1])});
      } else {
        if (v < 0.0) issues.push_back({line_no, fmt::format("negative value {}", f[1])});
        status = DayStatus::observed(v);
      }
    }
    auto& slot = rows[*date];
    if (slot.rows++ == 0) slot.first = status;
  }
  if (rows.empty()) throw ParseError("daily series has no valid rows", lines.size());

  const Date start = rows.begin()->first;
  const Date end = rows.rbegin()->first;
  std::vector<DayStatus> entries(static_cast<std::size_t>(days_between(start, end) + 1), DayStatus::missing());
  for (const auto& [date, slot] : rows) {
    auto idx = static_cast<std::size_t>(days_between(start, date));
    if (slot.rows > 1) {
      double original = slot.first.kind == DayStatus::Kind::Missing ? 0.0 : slot.first.value;
      entries[idx] = DayStatus::flagged(QcReason::DuplicateDate, original);
      issues.push_back({0, fmt::format("duplicate date {} ({} rows)", format_iso_date(date), slot.rows)});
    } else {
      entries[idx] = slot.first;
    }
  }
  return {DailySeries(std::move(station_id), start, std::move(entries)), std::move(issues)};
}

// ---------------------------------------------------------------------------
// Quality control
// ---------------------------------------------------------------------------

void QcConfig::validate() const {
  if (min_run < 2) throw ValidationError("qc.min_run must be at least 2");
  if (!(min_value > 0.0)) throw ValidationError("qc.min_value must be positive");
  if (!(max_daily > 0.0)) throw ValidationError("qc.max_daily must be positive");
  if (wet_months.empty()) throw ValidationError("qc.wet_months must not be empty");
  for (int m : wet_months)
    if (m < 1 || m > 12) throw ValidationError(fmt::format("qc.wet_months contains invalid month {}", m));
  if (!(dry_month_floor >= 0.0)) throw ValidationError("qc.dry_month_floor must be non-negative");
  if (min_station_years < 1) throw ValidationError("qc.min_station_years must be at least 1");
  if (!(eligibility >= 0.0 && eligibility <= 1.0)) throw ValidationError("qc.eligibility must be in [0,1]");
  if (analysis_start && analysis_end && *analysis_start > *analysis_end)
    throw ValidationError("qc analysis period is reversed");
}

std::size_t QcReport::total_flagged() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::string QcReport::to_json() const {
  nlohmann::ordered_json j;
  j["station_id"] = station_id;
  nlohmann::ordered_json c;
  for (auto r : kAllQcReasons) c[std::string(rainval::to_string(r))] = count(r);
  j["flag_counts"] = c;
  j["n_days"] = n_days;
  j["completeness_before"] = detail::round6(completeness_before);
  j["completeness_after"] = detail::round6(completeness_after);
  j["eligible"] = eligible;
  return j.dump(2);
}

namespace {

DailySeries with_entries(const DailySeries& s, std::vector<DayStatus> entries) {
  return DailySeries(s.station_id(), s.start_date(), std::move(entries));
}

}  // namespace

DailySeries qc_extremes(const DailySeries& series, double max_daily) {
  auto entries = series.entries();
  for (auto& e : entries) {
    if (!e.is_observed()) continue;
    if (e.value < 0.0)
      e = DayStatus::flagged(QcReason::NegativeValue, e.value);
    else if (e.value > max_daily)
      e = DayStatus::flagged(QcReason::ExtremeValue, e.value);
  }
  return with_entries(series, std::move(entries));
}

DailySeries qc_consecutive_identical(const DailySeries& series, int min_run, double min_value) {
  auto entries = series.entries();
  const std::size_t n = entries.size();
  std::size_t i = 0;
  while (i < n) {
    const auto& head = entries[i];
    if (!head.is_observed() || head.value <= 0.0 || head.value < min_value) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n && entries[j].is_observed() && entries[j].value == head.value) ++j;
    if (j - i >= static_cast<std::size_t>(min_run)) {
      const double v = head.value;
      for (std::size_t k = i; k < j; ++k) entries[k] = DayStatus::flagged(QcReason::ConsecutiveIdentical, v);
    }
    i = j;
  }
  return with_entries(series, std::move(entries));
}

DailySeries qc_dry_month(const DailySeries& series, const std::set<int>& wet_months, int min_station_years,
                         double climatology_floor) {
  struct MonthBlock {
    int year;
    unsigned month;
    std::size_t first, count;  // index range within the series
    bool complete;             // every calendar day of the month is observed
    bool all_zero;
    double total;
  };

  std::vector<MonthBlock> blocks;
  const auto& entries = series.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Date d = series.date_at(i);
    const int y = year_of(d);
    const unsigned m = month_of(d);
    if (blocks.empty() || blocks.back().year != y || blocks.back().month != m)
      blocks.push_back({y, m, i, 0, true, true, 0.0});
    auto& b = blocks.back();
    ++b.count;
    if (!entries[i].is_observed()) {
      b.complete = false;
      continue;
    }
    b.total += entries[i].value;
    if (entries[i].value != 0.0) b.all_zero = false;
  }
  for (auto& b : blocks)
    if (b.count != days_in_month(b.year, b.month)) b.complete = false;

  // Climatology uses complete, non-zero months only, so flagging a month
  // never changes the evidence used for any other month.
  std::array<double, 13> clim_sum{};
  std::array<int, 13> clim_n{};
  for (const auto& b : blocks) {
    if (b.complete && !b.all_zero) {
      clim_sum[b.month] += b.total;
      ++clim_n[b.month];
    }
  }

  auto out = entries;
  for (const auto& b : blocks) {
    if (!b.complete || !b.all_zero || !wet_months.count(static_cast<int>(b.month))) continue;
    if (clim_n[b.month] < min_station_years) continue;
    if (!(clim_sum[b.month] / clim_n[b.month] > climatology_floor)) continue;
    for (std::size_t k = b.first; k < b.first + b.count; ++k)
      out[k] = DayStatus::flagged(QcReason::SuspiciousDryMonth, 0.0);
  }
  return with_entries(series, std::move(out));
}

double observed_fraction(const DailySeries& series, Date start, Date end) {
  const long n = days_between(start, end) + 1;
  if (n <= 0) return 0.0;
  std::size_t observed = 0;
  for (Date d = start; d <= end; d += std::chrono::days{1}) {
    auto idx = series.index_of(d);
    if (idx && series[*idx].is_observed()) ++observed;
  }
  return static_cast<double>(observed) / static_cast<double>(n);
}

QcResult run_qc(const DailySeries& series, const QcConfig& config) {
  config.validate();
  const Date start = config.analysis_start.value_or(series.start_date());
  const Date end = config.analysis_end.value_or(series.end_date());

  auto s = qc_extremes(series, config.max_daily);
  s = qc_consecutive_identical(s, config.min_run, config.min_value);
  s = qc_dry_month(s, config.wet_months, config.min_station_years, config.dry_month_floor);

  QcReport report;
  report.station_id = series.station_id();
  for (const auto& e : s.entries())
    if (e.is_flagged()) ++report.counts[static_cast<std::size_t>(e.reason)];
  report.n_days = start <= end ? static_cast<std::size_t>(days_between(start, end) + 1) : 0;
  report.completeness_before = observed_fraction(series, start, end);
  report.completeness_after = observed_fraction(s, start, end);
  report.eligible = report.completeness_after >= config.eligibility;
  return {std::move(s), std::move(report)};
}

}  // namespace rainval
