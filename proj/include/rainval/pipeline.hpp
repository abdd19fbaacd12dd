#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rainval/gauge.hpp"
#include "rainval/grid.hpp"
#include "rainval/metrics.hpp"
#include "rainval/pairing.hpp"
#include "rainval/seasonal.hpp"
#include "rainval/spatial.hpp"

namespace rainval {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct CountryConfig {
  YearConvention convention;
  std::set<int> wet_months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
};

struct ProductSource {
  ProductMeta meta;
  std::filesystem::path descriptor;
  std::filesystem::path payload;
};

struct SpatialConfig {
  bool enabled = true;
  bool exclude_inconsistent = true;
  YearConvention convention;
  BlockinessThresholds thresholds;
};

struct RunConfig {
  std::filesystem::path station_table;
  std::map<std::string, std::filesystem::path> station_series;  // station id -> daily CSV
  std::vector<ProductSource> products;
  std::map<std::string, CountryConfig> countries;
  double rain_day_threshold = kDefaultRainDayThreshold;
  QcConfig qc;  // wet_months is replaced per country
  std::vector<std::string> missing_tokens = default_missing_tokens();
  int min_annual_days = kDefaultMinValidDays;
  YearScreening screening = YearScreening::Symmetric;
  int harmonics = kDefaultHarmonics;
  std::vector<double> sweep_thresholds{0.85, 2.0, 3.0, 4.0, 5.0};
  double max_missing_fraction = 1.0;
  SpatialConfig spatial;
  std::filesystem::path output_dir = "rainval-out";
  int jobs = 1;

  CountryConfig country(const std::string& name) const;

  /// Throws ConfigError naming the first violated rule.
  void validate() const;
};

/// Reads a YAML run configuration. Relative paths resolve against the
/// directory holding the file. Throws ConfigError for syntax errors, unknown
/// keys, invalid values and referenced files that do not exist.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view yaml_text, const std::filesystem::path& base_dir);

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct StationResult {
  StationMeta meta;
  CountryConfig country;
  std::string error;  // non-empty when the series could not be read
  std::vector<RowIssue> parse_issues;
  QcReport qc;
  DailySeries series;  // after QC
  std::vector<AnnualSummary> annual;
  std::optional<CategoryMap<double>> category_distribution;
};

struct ProductResult {
  ProductMeta meta;
  std::string error;  // non-empty when the grid could not be loaded
  std::optional<std::array<ClimatologyField, 3>> fields;
  std::array<ConsistencyScore, 3> consistency;
  std::optional<Verdict> verdict;  // worst verdict over the scored kinds
  bool excluded = false;
};

struct PairResult {
  std::string station_id;
  std::string product_id;
  std::string status;  // "scored", "excluded: <reason>" or "failed: <reason>"
  std::optional<NearestCell> cell;
  std::size_t n_paired_days = 0;

  std::vector<AnnualSummary> product_annual;
  std::array<AnnualComparison, 3> annual;
  std::array<ContinuousScores, 3> annual_scores;

  ContingencyTable contingency;
  Score pod;
  std::optional<ContingencyFractions> fractions;
  CategoryMap<double> category_pod;
  CategoryOutcome outcome;

  std::optional<SweepResult> sweep;

  bool scored() const { return status == "scored"; }
};

struct ValidationReport {
  double rain_day_threshold = kDefaultRainDayThreshold;
  std::vector<StationResult> stations;  // sorted by station id
  std::vector<ProductResult> products;  // sorted by product id
  std::vector<PairResult> pairs;        // station-major, then product

  const PairResult* find(const std::string& station_id, const std::string& product_id) const;
  bool has_input_failures() const;
};

struct RunOptions {
  bool annual = true;
  bool seasonal = true;
  bool intensity = true;
  bool spatial = true;  // run the spatial screen (still subject to config)
  int jobs = 0;         // 0: take RunConfig::jobs
  std::optional<bool> exclude_inconsistent;  // overrides the config
};

/// Loads and quality-controls every configured station.
std::vector<StationResult> run_qc_stage(const RunConfig& config);

/// Loads every product and scores its climatology fields.
std::vector<ProductResult> run_spatial_stage(const RunConfig& config, std::vector<std::optional<GriddedProduct>>* loaded = nullptr,
                                             bool score = true);

/// QC, spatial screen, extraction, pairing, annual metrics, seasonal models
/// and intensity analysis. Failures are isolated per station and product.
ValidationReport run_pipeline(const RunConfig& config, const RunOptions& options = {});

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

enum OutputSet : unsigned {
  kOutputQc = 1u << 0,
  kOutputSpatial = 1u << 1,
  kOutputAnnual = 1u << 2,
  kOutputSeasonal = 1u << 3,
  kOutputIntensity = 1u << 4,
  kOutputAll = 0x1Fu,
};

/// Full report as pretty JSON with numbers rounded to 6 significant digits.
std::string report_json(const ValidationReport& report);

/// Writes the selected artifacts into `out_dir` (created if needed) and
/// returns the written paths in write order. Throws IoError on failure.
std::vector<std::filesystem::path> emit_outputs(const ValidationReport& report, const std::filesystem::path& out_dir,
                                                unsigned outputs = kOutputAll);

}  // namespace rainval
