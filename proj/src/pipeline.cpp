#include "rainval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "csv.hpp"
#include "rainval/errors.hpp"

namespace rainval {

namespace {

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Exceptions are
/// collected per item and the one with the lowest index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) guarded(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StationResult process_station(const RunConfig& config, const StationMeta* meta, const std::string& id,
                              const std::filesystem::path& path) {
  StationResult out;
  out.meta.station_id = id;
  out.meta.name = id;
  if (!meta) {
    out.error = "station not listed in the station table";
    return out;
  }
  out.meta = *meta;
  out.country = config.country(meta->country);
  out.qc.station_id = id;
  try {
    const auto parsed = parse_daily_series(detail::read_text_file(path), id, config.missing_tokens);
    out.parse_issues = parsed.issues;
    QcConfig qc = config.qc;
    qc.wet_months = out.country.wet_months;
    qc.analysis_start = make_date(meta->period_start, 1, 1);
    qc.analysis_end = make_date(meta->period_end, 12, 31);
    auto result = run_qc(parsed.series, qc);
    out.qc = std::move(result.report);
    out.series = std::move(result.series);
  } catch (const InvariantError&) {
    throw;
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }
  out.annual = annual_summaries(out.series, config.rain_day_threshold, out.country.convention, config.min_annual_days);
  out.category_distribution = observed_category_distribution(out.series);
  return out;
}

bool station_eligible(const StationResult& s, const QcConfig& qc) {
  return s.error.empty() && s.qc.eligible && s.meta.completeness >= qc.eligibility;
}

void score_pair(PairResult& pair, const RunConfig& config, const RunOptions& options, const StationResult& station,
                const GriddedProduct& product) {
  const auto extraction = extract_point_series(product, station.meta, config.max_missing_fraction);
  if (const auto* ex = std::get_if<Excluded>(&extraction)) {
    pair.status = "excluded: " + ex->reason;
    return;
  }
  const auto& extracted = std::get<ExtractedSeries>(extraction);
  pair.cell = NearestCell{extracted.row, extracted.col, extracted.distance_km};

  const auto paired = align(station.series, extracted.series, pair.product_id);
  pair.n_paired_days = paired.size();
  if (paired.empty()) {
    pair.status = "excluded: no overlapping observations";
    return;
  }

  const auto convention = station.country.convention;
  const double thr = config.rain_day_threshold;
  if (options.annual) {
    pair.product_annual = annual_summaries(extracted.series, thr, convention, config.min_annual_days);
    pair.annual = paired_annual(station.annual, pair.product_annual, config.screening);
    for (std::size_t k = 0; k < 3; ++k) pair.annual_scores[k] = score_annual(pair.annual[k]);
  }
  if (options.seasonal) {
    pair.sweep = threshold_sweep(paired, config.sweep_thresholds, config.harmonics, convention, thr);
  }
  if (options.intensity) {
    pair.contingency = rain_day_contingency(paired, thr);
    pair.pod = pod(pair.contingency);
    pair.fractions = fractions(pair.contingency);
    pair.category_pod = category_pod(paired);
    pair.outcome = category_outcome_decomposition(paired);
  }
  pair.status = "scored";
}

}  // namespace

const PairResult* ValidationReport::find(const std::string& station_id, const std::string& product_id) const {
  for (const auto& p : pairs)
    if (p.station_id == station_id && p.product_id == product_id) return &p;
  return nullptr;
}

bool ValidationReport::has_input_failures() const {
  for (const auto& s : stations)
    if (!s.error.empty()) return true;
  for (const auto& p : products)
    if (!p.error.empty()) return true;
  for (const auto& p : pairs)
    if (p.status.rfind("failed:", 0) == 0) return true;
  return false;
}

std::vector<StationResult> run_qc_stage(const RunConfig& config) {
  const auto table = parse_station_table(detail::read_text_file(config.station_table));
  std::vector<std::pair<std::string, std::filesystem::path>> items(config.station_series.begin(),
                                                                   config.station_series.end());
  std::vector<StationResult> out(items.size());
  parallel_for(items.size(), config.jobs, [&](std::size_t i) {
    const auto& [id, path] = items[i];
    const auto it = std::find_if(table.begin(), table.end(), [&](const StationMeta& m) { return m.station_id == id; });
    out[i] = process_station(config, it == table.end() ? nullptr : &*it, id, path);
  });
  return out;
}

std::vector<ProductResult> run_spatial_stage(const RunConfig& config,
                                             std::vector<std::optional<GriddedProduct>>* loaded, bool score) {
  auto sources = config.products;
  std::sort(sources.begin(), sources.end(),
            [](const ProductSource& a, const ProductSource& b) { return a.meta.product_id < b.meta.product_id; });

  std::vector<ProductResult> out(sources.size());
  std::vector<std::optional<GriddedProduct>> grids(sources.size());
  parallel_for(sources.size(), config.jobs, [&](std::size_t i) {
    auto& res = out[i];
    res.meta = sources[i].meta;
    try {
      grids[i].emplace(load_grid_files(sources[i].descriptor, sources[i].payload, sources[i].meta));
    } catch (const InvariantError&) {
      throw;
    } catch (const Error& e) {
      res.error = e.what();
      return;
    }
    res.meta = grids[i]->meta();
    if (!score) return;
    res.fields = climatology_fields(*grids[i], config.rain_day_threshold, config.spatial.convention,
                                    config.min_annual_days);
    for (std::size_t k = 0; k < 3; ++k) {
      res.consistency[k] = blockiness_score((*res.fields)[k], config.spatial.thresholds);
      const auto v = res.consistency[k].verdict;
      if (v && (!res.verdict || *v > *res.verdict)) res.verdict = v;
    }
    res.excluded = config.spatial.exclude_inconsistent && res.verdict == Verdict::Inconsistent;
  });
  if (loaded) *loaded = std::move(grids);
  return out;
}

ValidationReport run_pipeline(const RunConfig& config_in, const RunOptions& options) {
  RunConfig config = config_in;
  if (options.jobs > 0) config.jobs = options.jobs;
  if (options.exclude_inconsistent) config.spatial.exclude_inconsistent = *options.exclude_inconsistent;
  const bool spatial = options.spatial && config.spatial.enabled;

  ValidationReport report;
  report.rain_day_threshold = config.rain_day_threshold;
  report.stations = run_qc_stage(config);

  std::vector<std::optional<GriddedProduct>> grids;
  report.products = run_spatial_stage(config, &grids, spatial);

  const std::size_t ns = report.stations.size(), np = report.products.size();
  report.pairs.resize(ns * np);
  parallel_for(ns * np, config.jobs, [&](std::size_t idx) {
    const auto& station = report.stations[idx / np];
    const auto& product = report.products[idx % np];
    auto& pair = report.pairs[idx];
    pair.station_id = station.meta.station_id;
    pair.product_id = product.meta.product_id;
    if (!station.error.empty()) {
      pair.status = "failed: " + station.error;
    } else if (!station_eligible(station, config.qc)) {
      pair.status = "excluded: gauge ineligible";
    } else if (!product.error.empty()) {
      pair.status = "failed: " + product.error;
    } else if (product.excluded) {
      pair.status = "excluded: spatial inconsistency";
    } else {
      try {
        score_pair(pair, config, options, station, *grids[idx % np]);
      } catch (const InvariantError&) {
        throw;
      } catch (const std::exception& e) {
        pair.status = std::string("failed: ") + e.what();
      }
    }
  });

  if (report.pairs.size() != ns * np) throw InvariantError("report does not cover every station x product pair");
  for (const auto& p : report.pairs)
    if (p.status.empty()) throw InvariantError(fmt::format("pair {} x {} has no status", p.station_id, p.product_id));
  return report;
}

}  // namespace rainval
