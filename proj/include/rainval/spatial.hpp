#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rainval/grid.hpp"
#include "rainval/pairing.hpp"
#include "rainval/score.hpp"

namespace rainval {

enum class ClimatologyKind { MeanAnnualTotal, MeanAnnualRainDays, MeanRainPerRainDay };
inline constexpr std::array<ClimatologyKind, 3> kAllClimatologyKinds = {
    ClimatologyKind::MeanAnnualTotal, ClimatologyKind::MeanAnnualRainDays, ClimatologyKind::MeanRainPerRainDay};

std::string_view to_string(ClimatologyKind kind);

/// Long-term per-cell average of one annual summary. Row r of `values` is grid
/// row r (latitude lat0 + r*dlat); cells with `valid` false are missing.
struct ClimatologyField {
  GridDescriptor descriptor;  // ntime is kept from the source product
  ClimatologyKind kind = ClimatologyKind::MeanAnnualTotal;
  double threshold = kDefaultRainDayThreshold;
  Eigen::ArrayXXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid;

  Eigen::Index valid_count() const { return valid.count(); }
};

/// Averages each cell's annual summaries over its valid years (at least
/// `min_days` non-missing days). Cells without a valid year, or without any
/// defined value for the kind, are missing.
ClimatologyField climatology_field(const GriddedProduct& product, ClimatologyKind kind,
                                   double threshold = kDefaultRainDayThreshold, YearConvention convention = {},
                                   int min_days = kDefaultMinValidDays);

/// All three kinds from a single pass over the product.
std::array<ClimatologyField, 3> climatology_fields(const GriddedProduct& product,
                                                   double threshold = kDefaultRainDayThreshold,
                                                   YearConvention convention = {},
                                                   int min_days = kDefaultMinValidDays);

enum class Verdict { Consistent, Suspicious, Inconsistent };
std::string_view to_string(Verdict v);

struct BlockinessThresholds {
  double suspicious = 0.05;    // score below this is consistent
  double inconsistent = 0.15;  // score at or above this is inconsistent
};

struct ConsistencyScore {
  Score blockiness;
  std::optional<Verdict> verdict;  // absent when the score is
  std::size_t n_cells = 0;         // interior cells that were scored
};

/// Median over interior cells of |f - mean of its valid 4-neighbours|,
/// divided by the interquartile range of all valid cells (0 when the IQR is
/// 0). Requires a grid of at least 5x5 with at least 9 scorable interior cells.
ConsistencyScore blockiness_score(const ClimatologyField& field, const BlockinessThresholds& thresholds = {});

/// Linear-interpolation quantile (q in [0,1]) of a non-empty sample.
double quantile(std::vector<double> sample, double q);

/// `lat,lon,value` rows; missing cells are written as empty values.
std::string field_to_csv(const ClimatologyField& field);

/// Heatmap with north at the top. Colours ramp linearly from #ffffcc (field
/// minimum) to #0c2c84 (field maximum); missing cells are #d9d9d9.
std::string render_svg_heatmap(const ClimatologyField& field, std::string_view title);

}  // namespace rainval
