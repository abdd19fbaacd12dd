#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace rainval {

using Date = std::chrono::sys_days;

/// Parses a strict `YYYY-MM-DD` calendar date. Returns nullopt for anything else,
/// including well-formed but nonexistent dates such as 2001-02-29.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(Date d);

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline std::chrono::year_month_day ymd(Date d) { return std::chrono::year_month_day{d}; }

inline int year_of(Date d) { return static_cast<int>(ymd(d).year()); }
inline unsigned month_of(Date d) { return static_cast<unsigned>(ymd(d).month()); }
inline unsigned day_of(Date d) { return static_cast<unsigned>(ymd(d).day()); }

inline long days_between(Date from, Date to) { return (to - from).count(); }

unsigned days_in_month(int year, unsigned month);

}  // namespace rainval
