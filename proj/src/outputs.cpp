#include <filesystem>
#include <system_error>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "rainval/errors.hpp"
#include "rainval/pipeline.hpp"

namespace rainval {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using detail::format_number;
using detail::round6;

json num(double v) { return std::isfinite(v) ? json(round6(v)) : json(nullptr); }

json score_json(const Score& s) {
  if (s.value) return num(*s.value);
  return json{{"absent", s.reason}};
}

json continuous_json(const ContinuousScores& c) {
  return json{{"n", c.n}, {"me", score_json(c.me)}, {"pbias", score_json(c.pbias)}, {"r", score_json(c.r)},
              {"rsd", score_json(c.rsd)}};
}

json model_json(const HarmonicModel& m) {
  json a = json::array(), b = json::array();
  for (Eigen::Index i = 0; i < m.a.size(); ++i) {
    a.push_back(num(m.a[i]));
    b.push_back(num(m.b[i]));
  }
  json j{{"k", m.k},           {"beta0", num(m.beta0)},        {"a", a},
         {"b", b},             {"converged", m.converged},     {"deviance", num(m.deviance)},
         {"n_obs", m.n_obs},   {"iterations", m.iterations}};
  if (!m.note.empty()) j["note"] = m.note;
  return j;
}

json annual_json(const AnnualSummary& s) {
  return json{{"year", s.year_label},
              {"total_mm", num(s.total_rain)},
              {"rain_days", s.rain_days},
              {"mean_per_rain_day", s.mean_rain_per_rain_day ? num(*s.mean_rain_per_rain_day) : json(nullptr)},
              {"n_valid_days", s.n_valid_days},
              {"valid", s.valid}};
}

template <typename T, typename F>
json category_json(const CategoryMap<T>& map, F&& convert) {
  json j = json::object();
  for (auto c : kAllCategories) {
    const auto& v = map[index(c)];
    j[std::string(to_string(c))] = v ? convert(*v) : json(nullptr);
  }
  return j;
}

json outcome_row_json(const OutcomeRow& r) {
  return json{{"n_observed", r.n_observed}, {"true_hit", num(r.true_hit)}, {"true_miss", num(r.true_miss)},
              {"lower", num(r.lower)},      {"higher", num(r.higher)}};
}

json station_json(const StationResult& s) {
  json j{{"station_id", s.meta.station_id}, {"country", s.meta.country}};
  if (!s.error.empty()) {
    j["error"] = s.error;
    return j;
  }
  j["latitude"] = num(s.meta.latitude);
  j["longitude"] = num(s.meta.longitude);
  j["parse_issues"] = json::array();
  for (const auto& issue : s.parse_issues)
    j["parse_issues"].push_back(json{{"line", issue.line}, {"message", issue.message}});
  j["qc"] = json::parse(s.qc.to_json());
  j["annual"] = json::array();
  for (const auto& a : s.annual) j["annual"].push_back(annual_json(a));
  j["category_distribution"] = s.category_distribution
                                   ? category_json(*s.category_distribution, [](double v) { return num(v); })
                                   : json(nullptr);
  return j;
}

json product_json(const ProductResult& p) {
  json j{{"product_id", p.meta.product_id}, {"inputs_class", std::string(to_string(p.meta.inputs_class))}};
  if (!p.error.empty()) {
    j["error"] = p.error;
    return j;
  }
  j["spatial_resolution"] = num(p.meta.spatial_resolution);
  j["period_start"] = format_iso_date(p.meta.period_start);
  j["period_end"] = format_iso_date(p.meta.period_end);
  if (p.fields) {
    json c = json::object();
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& s = p.consistency[k];
      c[std::string(to_string(kAllClimatologyKinds[k]))] =
          json{{"blockiness", score_json(s.blockiness)},
               {"verdict", s.verdict ? json(std::string(to_string(*s.verdict))) : json(nullptr)},
               {"n_cells", s.n_cells}};
    }
    j["consistency"] = c;
  }
  j["verdict"] = p.verdict ? json(std::string(to_string(*p.verdict))) : json(nullptr);
  j["excluded"] = p.excluded;
  return j;
}

json pair_json(const PairResult& p) {
  json j{{"station_id", p.station_id}, {"product_id", p.product_id}, {"status", p.status}};
  if (p.cell)
    j["cell"] = json{{"row", p.cell->row}, {"col", p.cell->col}, {"distance_km", num(p.cell->distance_km)}};
  if (!p.scored()) return j;
  j["n_paired_days"] = p.n_paired_days;

  json annual = json::object();
  for (std::size_t k = 0; k < 3; ++k)
    annual[std::string(to_string(kAllSummaryKinds[k]))] = continuous_json(p.annual_scores[k]);
  j["annual_scores"] = annual;

  j["contingency"] = json{{"hits", p.contingency.hits},
                          {"misses", p.contingency.misses},
                          {"false_alarms", p.contingency.false_alarms},
                          {"correct_negatives", p.contingency.correct_negatives}};
  j["pod"] = score_json(p.pod);
  if (p.fractions)
    j["fractions"] = json{{"hits", num(p.fractions->hits)},
                          {"misses", num(p.fractions->misses)},
                          {"false_alarms", num(p.fractions->false_alarms)},
                          {"correct_negatives", num(p.fractions->correct_negatives)}};
  j["category_pod"] = category_json(p.category_pod, [](double v) { return num(v); });
  j["category_outcome"] = category_json(p.outcome, outcome_row_json);

  if (p.sweep) {
    const auto& s = *p.sweep;
    json sweep{{"gauge_threshold", num(s.gauge_threshold)}, {"n_paired_days", s.n_paired_days}};
    sweep["gauge_model"] = s.gauge_model ? model_json(*s.gauge_model) : json(nullptr);
    if (!s.gauge_error.empty()) sweep["gauge_error"] = s.gauge_error;
    sweep["rows"] = json::array();
    for (const auto& r : s.rows) {
      json row{{"threshold", num(r.threshold)}};
      row["model"] = r.model ? model_json(*r.model) : json(nullptr);
      row["curve_distance"] = r.curve_distance ? num(*r.curve_distance) : json(nullptr);
      if (!r.error.empty()) row["error"] = r.error;
      sweep["rows"].push_back(row);
    }
    sweep["best_threshold"] = s.best_threshold ? num(*s.best_threshold) : json(nullptr);
    j["seasonal"] = sweep;
  }
  return j;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

void score_row(std::string& out, const PairResult& p, std::string_view summary, std::string_view metric,
               const Score& s, std::size_t n) {
  out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(p.station_id), csv_field(p.product_id), summary, metric,
                     opt_number(s.value), n, s.value ? std::string{} : s.reason);
}

std::string scores_csv(const ValidationReport& report) {
  std::string out = "station,product,summary,metric,value,n,reason_if_absent\n";
  for (const auto& p : report.pairs) {
    if (!p.scored()) continue;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& c = p.annual_scores[k];
      const auto summary = to_string(kAllSummaryKinds[k]);
      score_row(out, p, summary, "me", c.me, c.n);
      score_row(out, p, summary, "pbias", c.pbias, c.n);
      score_row(out, p, summary, "r", c.r, c.n);
      score_row(out, p, summary, "rsd", c.rsd, c.n);
    }
    const auto n = p.contingency.total();
    score_row(out, p, "daily_rain_day", "pod", p.pod, n);
    const auto frac = [&](double ContingencyFractions::*field) {
      return p.fractions ? Score::of((*p.fractions).*field) : Score::absent("no_paired_days");
    };
    score_row(out, p, "daily_rain_day", "hit_fraction", frac(&ContingencyFractions::hits), n);
    score_row(out, p, "daily_rain_day", "miss_fraction", frac(&ContingencyFractions::misses), n);
    score_row(out, p, "daily_rain_day", "false_alarm_fraction", frac(&ContingencyFractions::false_alarms), n);
    score_row(out, p, "daily_rain_day", "correct_negative_fraction", frac(&ContingencyFractions::correct_negatives),
              n);
    for (auto c : kAllCategories) {
      const auto& row = p.outcome[index(c)];
      const auto& v = p.category_pod[index(c)];
      score_row(out, p, fmt::format("category_{}", to_string(c)), "pod",
                v ? Score::of(*v) : Score::absent("no_observed_days"), row ? row->n_observed : 0);
    }
  }
  return out;
}

std::string status_csv(const ValidationReport& report) {
  std::string out = "station,product,status,row,col,distance_km,n_paired_days\n";
  for (const auto& p : report.pairs) {
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(p.station_id), csv_field(p.product_id),
                       csv_field(p.status), p.cell ? std::to_string(p.cell->row) : "",
                       p.cell ? std::to_string(p.cell->col) : "", p.cell ? format_number(p.cell->distance_km) : "",
                       p.n_paired_days);
  }
  return out;
}

void annual_rows(std::string& out, std::string_view station, std::string_view product,
                 const std::vector<AnnualSummary>& rows) {
  for (const auto& a : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(station), csv_field(product), a.year_label,
                       format_number(a.total_rain), a.rain_days, opt_number(a.mean_rain_per_rain_day),
                       a.valid ? "true" : "false");
  }
}

std::string annual_csv(const ValidationReport& report) {
  std::string out = "station,product,year,total_mm,rain_days,mean_per_rain_day,valid\n";
  for (const auto& s : report.stations) {
    if (!s.error.empty()) continue;
    annual_rows(out, s.meta.station_id, "gauge", s.annual);
    for (const auto& p : report.pairs)
      if (p.station_id == s.meta.station_id && p.scored()) annual_rows(out, p.station_id, p.product_id, p.product_annual);
  }
  return out;
}

std::string category_distribution_csv(const ValidationReport& report) {
  std::string out = "station,light,moderate,heavy,violent\n";
  for (const auto& s : report.stations) {
    if (!s.error.empty()) continue;
    out += csv_field(s.meta.station_id);
    for (std::size_t c = 1; c < kCategoryCount; ++c)
      out += "," + (s.category_distribution ? opt_number((*s.category_distribution)[c]) : std::string{});
    out += '\n';
  }
  return out;
}

std::string spatial_csv(const ValidationReport& report) {
  std::string out = "product,kind,blockiness,n_cells,verdict,excluded,reason_if_absent\n";
  for (const auto& p : report.products) {
    if (!p.fields) continue;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& s = p.consistency[k];
      out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(p.meta.product_id), to_string(kAllClimatologyKinds[k]),
                         opt_number(s.blockiness.value), s.n_cells,
                         s.verdict ? std::string(to_string(*s.verdict)) : std::string{}, p.excluded ? "true" : "false",
                         s.blockiness.value ? std::string{} : s.blockiness.reason);
    }
  }
  return out;
}

std::string models_csv(const PairResult& p) {
  const auto& s = *p.sweep;
  int k = 0;
  if (s.gauge_model) k = s.gauge_model->k;
  for (const auto& r : s.rows)
    if (r.model) k = r.model->k;
  std::string out = "station,product,Tr,k,beta0";
  for (int i = 1; i <= k; ++i) out += fmt::format(",A{},B{}", i, i);
  out += ",converged,deviance,curve_distance,error\n";

  auto row = [&](std::string_view product, double tr, const std::optional<HarmonicModel>& m,
                 const std::optional<double>& dist, const std::string& error) {
    out += fmt::format("{},{},{},{},", csv_field(p.station_id), csv_field(product), format_number(tr), k);
    if (m) {
      out += format_number(m->beta0);
      for (int i = 0; i < k; ++i) out += fmt::format(",{},{}", format_number(m->a[i]), format_number(m->b[i]));
      out += fmt::format(",{},{},{},", m->converged ? "true" : "false", format_number(m->deviance), opt_number(dist));
    } else {
      out += std::string(static_cast<std::size_t>(2 * k), ',') + ",,,,";
    }
    out += csv_field(error) + "\n";
  };
  row("gauge", s.gauge_threshold, s.gauge_model, std::nullopt, s.gauge_error);
  for (const auto& r : s.rows) row(p.product_id, r.threshold, r.model, r.curve_distance, r.error);
  return out;
}

std::string curve_csv(const PairResult& p) {
  const auto& s = *p.sweep;
  const HarmonicModel* same = nullptr;
  const HarmonicModel* best = nullptr;
  for (const auto& r : s.rows) {
    if (!r.model) continue;
    if (r.threshold == s.gauge_threshold) same = &*r.model;
    if (s.best_threshold && r.threshold == *s.best_threshold) best = &*r.model;
  }
  std::string out = "t,p_gauge,p_product,p_product_best\n";
  auto p_of = [](const HarmonicModel* m, int t) { return m ? format_number(predict_occurrence(*m, t)) : std::string{}; };
  const HarmonicModel* g = s.gauge_model ? &*s.gauge_model : nullptr;
  for (int t = 1; t <= kSeasonLength; ++t)
    out += fmt::format("{},{},{},{}\n", t, p_of(g, t), p_of(same, t), p_of(best, t));
  return out;
}

std::string categories_csv(const PairResult& p) {
  std::string out = "category,n_observed,pod,true_hit,true_miss,lower,higher\n";
  for (auto c : kAllCategories) {
    const auto& row = p.outcome[index(c)];
    const auto& v = p.category_pod[index(c)];
    if (!row) {
      out += fmt::format("{},0,,,,,\n", to_string(c));
      continue;
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", to_string(c), row->n_observed, opt_number(v),
                       format_number(row->true_hit), format_number(row->true_miss), format_number(row->lower),
                       format_number(row->higher));
  }
  return out;
}

}  // namespace

std::string report_json(const ValidationReport& report) {
  json j;
  j["rain_day_threshold"] = num(report.rain_day_threshold);
  j["blockiness_note"] =
      "blockiness is a heuristic pixelation score: median neighbour residual divided by the field IQR";
  j["stations"] = json::array();
  for (const auto& s : report.stations) j["stations"].push_back(station_json(s));
  j["products"] = json::array();
  for (const auto& p : report.products) j["products"].push_back(product_json(p));
  j["pairs"] = json::array();
  for (const auto& p : report.pairs) j["pairs"].push_back(pair_json(p));
  return j.dump(2) + "\n";
}

std::vector<fs::path> emit_outputs(const ValidationReport& report, const fs::path& out_dir, unsigned outputs) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", out_dir.string(), ec.message()));

  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    detail::write_text_file(path, content);
    written.push_back(path);
  };

  put("report.json", report_json(report));
  put("status.csv", status_csv(report));
  put("scores.csv", scores_csv(report));

  if (outputs & kOutputQc) {
    json qc = json::array();
    for (const auto& s : report.stations)
      if (s.error.empty()) qc.push_back(json::parse(s.qc.to_json()));
    put("qc_reports.json", qc.dump(2) + "\n");
    put("category_distribution.csv", category_distribution_csv(report));
  }
  if (outputs & kOutputAnnual) put("annual_summaries.csv", annual_csv(report));
  if (outputs & kOutputSpatial) {
    put("spatial_scores.csv", spatial_csv(report));
    for (const auto& p : report.products) {
      if (!p.fields) continue;
      const auto id = detail::file_token(p.meta.product_id);
      for (const auto& field : *p.fields) {
        const auto kind = std::string(to_string(field.kind));
        put(fmt::format("{}__{}.csv", id, kind), field_to_csv(field));
        put(fmt::format("{}__{}.svg", id, kind), render_svg_heatmap(field, p.meta.product_id + " " + kind));
      }
    }
  }
  for (const auto& p : report.pairs) {
    if (!p.scored()) continue;
    const auto stem = fmt::format("{}__{}", detail::file_token(p.station_id), detail::file_token(p.product_id));
    if ((outputs & kOutputSeasonal) && p.sweep) {
      put(stem + "__seasonal_models.csv", models_csv(p));
      put(stem + "__seasonal_curve.csv", curve_csv(p));
    }
    if (outputs & kOutputIntensity) put(stem + "__categories.csv", categories_csv(p));
  }
  return written;
}

}  // namespace rainval
