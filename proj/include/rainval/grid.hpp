#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rainval/date.hpp"
#include "rainval/gauge.hpp"

namespace rainval {

enum class InputsClass { Satellite, SatelliteGauge, Reanalysis };

std::string_view to_string(InputsClass c);
/// Accepts "satellite", "satellite+gauge" and "reanalysis".
InputsClass parse_inputs_class(std::string_view text);

struct ProductMeta {
  std::string product_id;
  InputsClass inputs_class = InputsClass::Satellite;
  double spatial_resolution = 0.0;  // degrees
  Date period_start{};
  Date period_end{};
  std::string temporal_resolution = "daily";
};

/// Regular lat/lon grid with a daily time axis. Row r has its cell centre at
/// lat0 + r*dlat, column c at lon0 + c*dlon.
struct GridDescriptor {
  double lat0 = 0.0;
  double lon0 = 0.0;
  double dlat = 1.0;
  double dlon = 1.0;
  int nlat = 1;
  int nlon = 1;
  Date time_start{};
  int ntime = 1;
  double missing_sentinel = -9999.0;

  double cell_lat(int row) const { return lat0 + row * dlat; }
  double cell_lon(int col) const { return lon0 + col * dlon; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nlat) * static_cast<std::size_t>(nlon); }
  std::size_t value_count() const { return cell_count() * static_cast<std::size_t>(ntime); }
  Date date_at(int t) const { return time_start + std::chrono::days{t}; }

  /// Throws ValidationError on degenerate spacing, empty shape or a domain
  /// leaving [-90,90] x [-180,180].
  void validate() const;

  friend bool operator==(const GridDescriptor&, const GridDescriptor&) = default;
};

/// Parses the descriptor JSON. Exactly the GridDescriptor fields are accepted.
GridDescriptor parse_grid_descriptor(std::string_view json_text);
/// Canonical descriptor JSON (fixed key order, two-space indent).
std::string to_json(const GridDescriptor& d);

/// Dense (time, lat, lon) row-major block of daily values. Cells equal to the
/// sentinel or NaN are missing. The stored floats are kept bit-for-bit so a
/// product can be written back unchanged.
class GriddedProduct {
 public:
  GriddedProduct(ProductMeta meta, GridDescriptor descriptor, std::vector<float> values);

  const ProductMeta& meta() const { return meta_; }
  const GridDescriptor& descriptor() const { return desc_; }
  const std::vector<float>& values() const { return values_; }

  std::size_t index(int t, int row, int col) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(desc_.nlat) + static_cast<std::size_t>(row)) *
               static_cast<std::size_t>(desc_.nlon) +
           static_cast<std::size_t>(col);
  }
  float at(int t, int row, int col) const { return values_[index(t, row, col)]; }
  bool is_missing(float v) const;

 private:
  ProductMeta meta_;
  GridDescriptor desc_;
  std::vector<float> values_;
};

/// Builds a product from descriptor JSON and a little-endian float32 payload.
/// Throws FormatError when the payload length does not match the shape.
/// When `meta` has no period, it is filled from the descriptor.
GriddedProduct load_grid(std::string_view descriptor_json, std::span<const std::byte> payload,
                         ProductMeta meta = {});
GriddedProduct load_grid_files(const std::filesystem::path& descriptor_path, const std::filesystem::path& payload_path,
                               ProductMeta meta = {});

std::vector<std::byte> encode_payload(std::span<const float> values);
std::vector<std::byte> write_grid_payload(const GriddedProduct& product);

/// Great-circle distance on a sphere of radius 6371 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct NearestCell {
  int row = 0;
  int col = 0;
  double distance_km = 0.0;
};

/// Cell whose centre is closest to the point by great-circle distance.
/// Distances within 1e-9 km count as ties and go to the smaller row, then the
/// smaller column. Points outside the grid map to the closest edge cell.
NearestCell nearest_cell(const GridDescriptor& d, double lat, double lon);

struct ExtractedSeries {
  DailySeries series;
  int row = 0;
  int col = 0;
  double distance_km = 0.0;
};

struct Excluded {
  std::string reason;
};

using ExtractionResult = std::variant<ExtractedSeries, Excluded>;

/// Pulls the nearest cell's time series for a station. A cell with no data at
/// all is always excluded; otherwise it is excluded when its missing fraction
/// exceeds `max_missing_fraction`.
ExtractionResult extract_point_series(const GriddedProduct& product, const StationMeta& station,
                                      double max_missing_fraction = 1.0);

struct ImportedGrid {
  GridDescriptor descriptor;
  std::vector<float> values;
};

/// Builds a grid from long-format CSV `date,lat,lon,value`. Latitudes,
/// longitudes and dates must each be uniformly spaced; absent combinations
/// become the sentinel.
ImportedGrid import_long_csv(std::string_view raw, double missing_sentinel = -9999.0);

}  // namespace rainval
