#include "rainval/pairing.hpp"

#include <algorithm>
#include <map>

namespace rainval {

Eigen::VectorXd PairedDailySeries::gauge_values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(days.size()));
  for (std::size_t i = 0; i < days.size(); ++i) v[static_cast<Eigen::Index>(i)] = days[i].gauge_mm;
  return v;
}

Eigen::VectorXd PairedDailySeries::product_values() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(days.size()));
  for (std::size_t i = 0; i < days.size(); ++i) v[static_cast<Eigen::Index>(i)] = days[i].product_mm;
  return v;
}

std::vector<Date> PairedDailySeries::dates() const {
  std::vector<Date> out;
  out.reserve(days.size());
  for (const auto& d : days) out.push_back(d.date);
  return out;
}

PairedDailySeries align(const DailySeries& gauge, const DailySeries& product, std::string product_id) {
  PairedDailySeries out;
  out.station_id = gauge.station_id();
  out.product_id = std::move(product_id);
  if (gauge.empty() || product.empty()) return out;
  const Date first = std::max(gauge.start_date(), product.start_date());
  const Date last = std::min(gauge.end_date(), product.end_date());
  for (Date d = first; d <= last; d += std::chrono::days{1}) {
    const auto& g = gauge[*gauge.index_of(d)];
    const auto& p = product[*product.index_of(d)];
    if (g.is_observed() && p.is_observed()) out.days.push_back({d, g.value, p.value});
  }
  return out;
}

int assign_year(Date d, YearConvention convention) {
  const int y = year_of(d);
  return static_cast<int>(month_of(d)) >= convention.start_month ? y : y - 1;
}

Date year_start(int label, YearConvention convention) {
  return make_date(label, static_cast<unsigned>(convention.start_month), 1);
}

Date year_end(int label, YearConvention convention) {
  return year_start(label + 1, convention) - std::chrono::days{1};
}

std::vector<AnnualSummary> annual_summaries(const DailySeries& series, double threshold, YearConvention convention,
                                            int min_days) {
  std::vector<AnnualSummary> out;
  double rain_sum = 0.0;
  auto close = [&] {
    if (out.empty()) return;
    auto& s = out.back();
    if (s.rain_days > 0) s.mean_rain_per_rain_day = rain_sum / s.rain_days;
    s.valid = s.n_valid_days >= min_days;
  };
  for (std::size_t i = 0; i < series.size(); ++i) {
    const int label = assign_year(series.date_at(i), convention);
    if (out.empty() || out.back().year_label != label) {
      close();
      out.push_back(AnnualSummary{label, 0.0, 0, std::nullopt, 0, false});
      rain_sum = 0.0;
    }
    const auto& e = series[i];
    if (!e.is_observed()) continue;
    auto& s = out.back();
    ++s.n_valid_days;
    s.total_rain += e.value;
    if (e.value >= threshold) {
      ++s.rain_days;
      rain_sum += e.value;
    }
  }
  close();
  return out;
}

std::string_view to_string(SummaryKind kind) {
  switch (kind) {
    case SummaryKind::Total: return "annual_total";
    case SummaryKind::RainDays: return "annual_rain_days";
    case SummaryKind::MeanPerRainDay: return "annual_mean_per_rain_day";
  }
  return "annual_total";
}

std::array<AnnualComparison, 3> paired_annual(const std::vector<AnnualSummary>& gauge,
                                              const std::vector<AnnualSummary>& product, YearScreening screening) {
  std::map<int, const AnnualSummary*> by_year;
  for (const auto& p : product) by_year[p.year_label] = &p;

  std::array<std::vector<int>, 3> years;
  std::array<std::vector<double>, 3> g_vals, p_vals;
  for (const auto& g : gauge) {
    if (!g.valid) continue;
    auto it = by_year.find(g.year_label);
    if (it == by_year.end()) continue;
    const auto& p = *it->second;
    if (screening == YearScreening::Symmetric && !p.valid) continue;
    auto push = [&](std::size_t k, double gv, double pv) {
      years[k].push_back(g.year_label);
      g_vals[k].push_back(gv);
      p_vals[k].push_back(pv);
    };
    push(0, g.total_rain, p.total_rain);
    push(1, g.rain_days, p.rain_days);
    if (g.mean_rain_per_rain_day && p.mean_rain_per_rain_day)
      push(2, *g.mean_rain_per_rain_day, *p.mean_rain_per_rain_day);
  }

  std::array<AnnualComparison, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    out[k].kind = kAllSummaryKinds[k];
    out[k].years = std::move(years[k]);
    out[k].gauge = Eigen::Map<const Eigen::VectorXd>(g_vals[k].data(), static_cast<Eigen::Index>(g_vals[k].size()));
    out[k].product = Eigen::Map<const Eigen::VectorXd>(p_vals[k].data(), static_cast<Eigen::Index>(p_vals[k].size()));
  }
  return out;
}

}  // namespace rainval
