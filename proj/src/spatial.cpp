#include "rainval/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "csv.hpp"

namespace rainval {

std::string_view to_string(ClimatologyKind kind) {
  switch (kind) {
    case ClimatologyKind::MeanAnnualTotal: return "mean_annual_total";
    case ClimatologyKind::MeanAnnualRainDays: return "mean_annual_rain_days";
    case ClimatologyKind::MeanRainPerRainDay: return "mean_rain_per_rain_day";
  }
  return "mean_annual_total";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Suspicious: return "suspicious";
    case Verdict::Inconsistent: return "inconsistent";
  }
  return "consistent";
}

std::array<ClimatologyField, 3> climatology_fields(const GriddedProduct& product, double threshold,
                                                   YearConvention convention, int min_days) {
  const auto& d = product.descriptor();
  const auto cells = static_cast<Eigen::Index>(d.cell_count());

  std::vector<int> year_slot(static_cast<std::size_t>(d.ntime));
  const int first_label = assign_year(d.time_start, convention);
  for (int t = 0; t < d.ntime; ++t) year_slot[static_cast<std::size_t>(t)] = assign_year(d.date_at(t), convention) - first_label;
  const Eigen::Index years = year_slot.back() + 1;

  // (cell, year) accumulators
  Eigen::ArrayXXd total = Eigen::ArrayXXd::Zero(cells, years);
  Eigen::ArrayXXd rain_sum = Eigen::ArrayXXd::Zero(cells, years);
  Eigen::ArrayXXi rain_days = Eigen::ArrayXXi::Zero(cells, years);
  Eigen::ArrayXXi n_valid = Eigen::ArrayXXi::Zero(cells, years);

  const auto& values = product.values();
  for (int t = 0; t < d.ntime; ++t) {
    const Eigen::Index y = year_slot[static_cast<std::size_t>(t)];
    const std::size_t base = static_cast<std::size_t>(t) * d.cell_count();
    for (Eigen::Index c = 0; c < cells; ++c) {
      const float v = values[base + static_cast<std::size_t>(c)];
      if (product.is_missing(v)) continue;
      const double mm = v;
      ++n_valid(c, y);
      total(c, y) += mm;
      if (mm >= threshold) {
        ++rain_days(c, y);
        rain_sum(c, y) += mm;
      }
    }
  }

  std::array<ClimatologyField, 3> out;
  for (std::size_t k = 0; k < 3; ++k) {
    out[k].descriptor = d;
    out[k].kind = kAllClimatologyKinds[k];
    out[k].threshold = threshold;
    out[k].values = Eigen::ArrayXXd::Zero(d.nlat, d.nlon);
    out[k].valid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(d.nlat, d.nlon, false);
  }
  for (Eigen::Index c = 0; c < cells; ++c) {
    const auto row = c / d.nlon, col = c % d.nlon;
    double sum_total = 0.0, sum_days = 0.0, sum_mean = 0.0;
    int n_years = 0, n_mean = 0;
    for (Eigen::Index y = 0; y < years; ++y) {
      if (n_valid(c, y) < min_days) continue;
      ++n_years;
      sum_total += total(c, y);
      sum_days += rain_days(c, y);
      if (rain_days(c, y) > 0) {
        sum_mean += rain_sum(c, y) / rain_days(c, y);
        ++n_mean;
      }
    }
    if (n_years > 0) {
      out[0].values(row, col) = sum_total / n_years;
      out[0].valid(row, col) = true;
      out[1].values(row, col) = sum_days / n_years;
      out[1].valid(row, col) = true;
    }
    if (n_mean > 0) {
      out[2].values(row, col) = sum_mean / n_mean;
      out[2].valid(row, col) = true;
    }
  }
  return out;
}

ClimatologyField climatology_field(const GriddedProduct& product, ClimatologyKind kind, double threshold,
                                   YearConvention convention, int min_days) {
  auto all = climatology_fields(product, threshold, convention, min_days);
  return std::move(all[static_cast<std::size_t>(kind)]);
}

double quantile(std::vector<double> sample, double q) {
  std::sort(sample.begin(), sample.end());
  const double pos = q * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (pos - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

ConsistencyScore blockiness_score(const ClimatologyField& field, const BlockinessThresholds& thresholds) {
  ConsistencyScore out;
  const auto nlat = field.values.rows(), nlon = field.values.cols();
  if (nlat < 5 || nlon < 5) {
    out.blockiness = Score::absent("grid_smaller_than_5x5");
    return out;
  }

  std::vector<double> residuals;
  for (Eigen::Index i = 1; i + 1 < nlat; ++i) {
    for (Eigen::Index j = 1; j + 1 < nlon; ++j) {
      if (!field.valid(i, j)) continue;
      double sum = 0.0;
      int n = 0;
      const std::array<std::pair<Eigen::Index, Eigen::Index>, 4> nbrs = {
          {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
      for (auto [a, b] : nbrs) {
        if (field.valid(a, b)) {
          sum += field.values(a, b);
          ++n;
        }
      }
      if (n > 0) residuals.push_back(std::abs(field.values(i, j) - sum / n));
    }
  }
  out.n_cells = residuals.size();
  if (residuals.size() < 9) {
    out.blockiness = Score::absent("too_few_interior_cells");
    return out;
  }

  std::vector<double> all;
  for (Eigen::Index i = 0; i < nlat; ++i)
    for (Eigen::Index j = 0; j < nlon; ++j)
      if (field.valid(i, j)) all.push_back(field.values(i, j));
  const double iqr = quantile(all, 0.75) - quantile(all, 0.25);
  const double score = iqr > 0.0 ? quantile(residuals, 0.5) / iqr : 0.0;

  out.blockiness = Score::of(score);
  out.verdict = score < thresholds.suspicious      ? Verdict::Consistent
                : score < thresholds.inconsistent ? Verdict::Suspicious
                                                  : Verdict::Inconsistent;
  return out;
}

std::string field_to_csv(const ClimatologyField& field) {
  std::string out = "lat,lon,value\n";
  const auto& d = field.descriptor;
  for (int r = 0; r < d.nlat; ++r) {
    for (int c = 0; c < d.nlon; ++c) {
      out += fmt::format("{},{},{}\n", detail::format_number(d.cell_lat(r)), detail::format_number(d.cell_lon(c)),
                         field.valid(r, c) ? detail::format_number(field.values(r, c)) : std::string{});
    }
  }
  return out;
}

std::string render_svg_heatmap(const ClimatologyField& field, std::string_view title) {
  constexpr int kCell = 12;
  constexpr int kHeader = 24;
  constexpr std::array<int, 3> kLow = {0xff, 0xff, 0xcc};
  constexpr std::array<int, 3> kHigh = {0x0c, 0x2c, 0x84};

  const auto nlat = static_cast<int>(field.values.rows()), nlon = static_cast<int>(field.values.cols());
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (int r = 0; r < nlat; ++r)
    for (int c = 0; c < nlon; ++c)
      if (field.valid(r, c)) {
        const double v = field.values(r, c);
        lo = any ? std::min(lo, v) : v;
        hi = any ? std::max(hi, v) : v;
        any = true;
      }

  const int width = nlon * kCell, height = nlat * kCell + kHeader;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", width, height,
      width, height);
  std::string escaped;
  for (char ch : title) {
    if (ch == '<') escaped += "&lt;";
    else if (ch == '>') escaped += "&gt;";
    else if (ch == '&') escaped += "&amp;";
    else escaped.push_back(ch);
  }
  svg += fmt::format("<text x=\"2\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">{} [{} .. {}]</text>\n",
                     escaped, detail::format_number(lo), detail::format_number(hi));
  for (int r = 0; r < nlat; ++r) {
    const int y = kHeader + (nlat - 1 - r) * kCell;
    for (int c = 0; c < nlon; ++c) {
      std::string colour = "#d9d9d9";
      if (field.valid(r, c)) {
        const double f = hi > lo ? (field.values(r, c) - lo) / (hi - lo) : 0.0;
        std::array<int, 3> rgb{};
        for (std::size_t k = 0; k < 3; ++k)
          rgb[k] = static_cast<int>(std::lround(kLow[k] + f * (kHigh[k] - kLow[k])));
        colour = fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
      }
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", c * kCell, y, kCell,
                         kCell, colour);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace rainval
