#include "rainval/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "rainval/errors.hpp"

namespace rainval {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kTieKm = 1e-9;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

std::string_view to_string(InputsClass c) {
  switch (c) {
    case InputsClass::Satellite: return "satellite";
    case InputsClass::SatelliteGauge: return "satellite+gauge";
    case InputsClass::Reanalysis: return "reanalysis";
  }
  return "satellite";
}

InputsClass parse_inputs_class(std::string_view text) {
  if (text == "satellite") return InputsClass::Satellite;
  if (text == "satellite+gauge") return InputsClass::SatelliteGauge;
  if (text == "reanalysis") return InputsClass::Reanalysis;
  throw ValidationError(fmt::format("unknown inputs class '{}'", text));
}

// ---------------------------------------------------------------------------
// Descriptor
// ---------------------------------------------------------------------------

void GridDescriptor::validate() const {
  if (!(dlat > 0.0) || !(dlon > 0.0) || !std::isfinite(dlat) || !std::isfinite(dlon))
    throw ValidationError(fmt::format("grid spacing must be positive (dlat={}, dlon={})", dlat, dlon));
  if (nlat < 1 || nlon < 1) throw ValidationError(fmt::format("grid shape {}x{} is empty", nlat, nlon));
  if (ntime < 1) throw ValidationError(fmt::format("grid has ntime={}", ntime));
  const double lat_last = cell_lat(nlat - 1), lon_last = cell_lon(nlon - 1);
  if (!(lat0 >= -90.0 && lat_last <= 90.0))
    throw ValidationError(fmt::format("grid latitudes [{}, {}] leave [-90,90]", lat0, lat_last));
  if (!(lon0 >= -180.0 && lon_last <= 180.0))
    throw ValidationError(fmt::format("grid longitudes [{}, {}] leave [-180,180]", lon0, lon_last));
  if (std::isnan(missing_sentinel)) throw ValidationError("missing_sentinel must be a number");
}

GridDescriptor parse_grid_descriptor(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("grid descriptor: ") + e.what(), 0);
  }
  if (!j.is_object()) throw ParseError("grid descriptor must be a JSON object", 0);

  static const std::set<std::string> keys{"lat0", "lon0",       "dlat",  "dlon",           "nlat",
                                          "nlon", "time_start", "ntime", "missing_sentinel"};
  for (const auto& [k, _] : j.items())
    if (!keys.count(k)) throw ValidationError(fmt::format("grid descriptor: unexpected field '{}'", k));
  for (const auto& k : keys)
    if (!j.contains(k)) throw ValidationError(fmt::format("grid descriptor: missing field '{}'", k));

  auto number = [&](const char* k) {
    if (!j[k].is_number()) throw ValidationError(fmt::format("grid descriptor: '{}' must be a number", k));
    return j[k].get<double>();
  };
  auto count = [&](const char* k) {
    if (!j[k].is_number_integer()) throw ValidationError(fmt::format("grid descriptor: '{}' must be an integer", k));
    return j[k].get<int>();
  };

  GridDescriptor d;
  d.lat0 = number("lat0");
  d.lon0 = number("lon0");
  d.dlat = number("dlat");
  d.dlon = number("dlon");
  d.nlat = count("nlat");
  d.nlon = count("nlon");
  d.ntime = count("ntime");
  d.missing_sentinel = number("missing_sentinel");
  if (!j["time_start"].is_string()) throw ValidationError("grid descriptor: 'time_start' must be a string");
  auto start = parse_iso_date(j["time_start"].get<std::string>());
  if (!start) throw ValidationError("grid descriptor: 'time_start' is not an ISO-8601 date");
  d.time_start = *start;
  d.validate();
  return d;
}

std::string to_json(const GridDescriptor& d) {
  nlohmann::ordered_json j;
  j["lat0"] = d.lat0;
  j["lon0"] = d.lon0;
  j["dlat"] = d.dlat;
  j["dlon"] = d.dlon;
  j["nlat"] = d.nlat;
  j["nlon"] = d.nlon;
  j["time_start"] = format_iso_date(d.time_start);
  j["ntime"] = d.ntime;
  j["missing_sentinel"] = d.missing_sentinel;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Product
// ---------------------------------------------------------------------------

GriddedProduct::GriddedProduct(ProductMeta meta, GridDescriptor descriptor, std::vector<float> values)
    : meta_(std::move(meta)), desc_(descriptor), values_(std::move(values)) {
  desc_.validate();
  if (values_.size() != desc_.value_count())
    throw FormatError(fmt::format("grid holds {} values, descriptor requires {}", values_.size(), desc_.value_count()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    float v = values_[i];
    if (!is_missing(v) && !(v >= 0.0f))
      throw ValidationError(fmt::format("grid value {} at flat index {} is negative", v, i));
  }
  if (meta_.period_start == Date{} && meta_.period_end == Date{}) {
    meta_.period_start = desc_.time_start;
    meta_.period_end = desc_.date_at(desc_.ntime - 1);
  }
  if (meta_.spatial_resolution <= 0.0) meta_.spatial_resolution = std::max(desc_.dlat, desc_.dlon);
}

bool GriddedProduct::is_missing(float v) const {
  return std::isnan(v) || static_cast<double>(v) == desc_.missing_sentinel ||
         v == static_cast<float>(desc_.missing_sentinel);
}

GriddedProduct load_grid(std::string_view descriptor_json, std::span<const std::byte> payload, ProductMeta meta) {
  auto d = parse_grid_descriptor(descriptor_json);
  const std::size_t expected = d.value_count() * 4;
  if (payload.size() != expected)
    throw FormatError(fmt::format("payload is {} bytes, expected {} ({}x{}x{} float32)", payload.size(), expected,
                                  d.ntime, d.nlat, d.nlon));
  std::vector<float> values(d.value_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | std::to_integer<std::uint32_t>(payload[i * 4 + b]);
    values[i] = std::bit_cast<float>(bits);
  }
  return GriddedProduct(std::move(meta), d, std::move(values));
}

GriddedProduct load_grid_files(const std::filesystem::path& descriptor_path, const std::filesystem::path& payload_path,
                               ProductMeta meta) {
  auto text = detail::read_text_file(descriptor_path);
  auto bytes = detail::read_binary_file(payload_path);
  return load_grid(text, bytes, std::move(meta));
}

std::vector<std::byte> encode_payload(std::span<const float> values) {
  std::vector<std::byte> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<std::byte>((bits >> (8 * b)) & 0xFFu);
  }
  return out;
}

std::vector<std::byte> write_grid_payload(const GriddedProduct& product) { return encode_payload(product.values()); }

// ---------------------------------------------------------------------------
// Point-to-pixel
// ---------------------------------------------------------------------------

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  const double p1 = deg2rad(lat1), p2 = deg2rad(lat2);
  const double sdp = std::sin((p2 - p1) / 2.0);
  const double sdl = std::sin(deg2rad(lon2 - lon1) / 2.0);
  const double a = sdp * sdp + std::cos(p1) * std::cos(p2) * sdl * sdl;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

NearestCell nearest_cell(const GridDescriptor& d, double lat, double lon) {
  // Within one row the distance grows with the wrapped longitude gap, so only
  // the columns bracketing the point (and the edges, for wrap-around) compete.
  std::vector<int> cols;
  for (double shift : {0.0, 360.0, -360.0}) {
    const double pos = std::round((lon + shift - d.lon0) / d.dlon);
    const int c0 = static_cast<int>(std::clamp(pos, 0.0, static_cast<double>(d.nlon - 1)));
    for (int c = c0 - 1; c <= c0 + 1; ++c)
      if (c >= 0 && c < d.nlon) cols.push_back(c);
  }
  cols.push_back(0);
  cols.push_back(d.nlon - 1);
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  NearestCell best{0, 0, std::numeric_limits<double>::infinity()};
  for (int r = 0; r < d.nlat; ++r) {
    const double clat = d.cell_lat(r);
    for (int c : cols) {
      const double dist = haversine_km(lat, lon, clat, d.cell_lon(c));
      if (dist < best.distance_km - kTieKm) best = {r, c, dist};
    }
  }
  return best;
}

ExtractionResult extract_point_series(const GriddedProduct& product, const StationMeta& station,
                                      double max_missing_fraction) {
  const auto& d = product.descriptor();
  const auto cell = nearest_cell(d, station.latitude, station.longitude);

  std::vector<DayStatus> entries;
  entries.reserve(static_cast<std::size_t>(d.ntime));
  std::size_t missing = 0;
  for (int t = 0; t < d.ntime; ++t) {
    const float v = product.at(t, cell.row, cell.col);
    if (product.is_missing(v)) {
      entries.push_back(DayStatus::missing());
      ++missing;
    } else {
      entries.push_back(DayStatus::observed(static_cast<double>(v)));
    }
  }
  const double fraction = static_cast<double>(missing) / static_cast<double>(d.ntime);
  if (missing == entries.size()) return Excluded{"nearest pixel has no data"};
  if (fraction > max_missing_fraction)
    return Excluded{fmt::format("nearest pixel missing {:.1f}% of days (limit {:.1f}%)", 100.0 * fraction,
                                100.0 * max_missing_fraction)};
  return ExtractedSeries{DailySeries(station.station_id, d.time_start, std::move(entries)), cell.row, cell.col,
                         cell.distance_km};
}

// ---------------------------------------------------------------------------
// Long-format CSV import
// ---------------------------------------------------------------------------

namespace {

struct Axis {
  double origin = 0.0;
  double step = 1.0;
  int count = 1;
};

Axis infer_axis(const std::set<double>& values, const char* name, double fallback_step) {
  Axis a;
  a.origin = *values.begin();
  if (values.size() == 1) {
    a.step = fallback_step;
    return a;
  }
  double step = std::numeric_limits<double>::infinity();
  for (auto it = std::next(values.begin()); it != values.end(); ++it) step = std::min(step, *it - *std::prev(it));
  for (double v : values) {
    const double k = (v - a.origin) / step;
    if (std::abs(k - std::round(k)) > 1e-6)
      throw ValidationError(fmt::format("{} values are not uniformly spaced (step {}, value {})", name, step, v));
  }
  a.step = step;
  a.count = static_cast<int>(std::lround((*values.rbegin() - a.origin) / step)) + 1;
  return a;
}

}  // namespace

ImportedGrid import_long_csv(std::string_view raw, double missing_sentinel) {
  auto lines = detail::split_lines(raw);
  if (lines.empty()) throw ParseError("grid CSV is empty", 1);
  {
    auto h = detail::split_csv(lines[0]);
    if (h != std::vector<std::string>{"date", "lat", "lon", "value"})
      throw ParseError("grid CSV header must be 'date,lat,lon,value'", 1);
  }

  struct Row {
    Date date;
    double lat, lon;
    std::optional<float> value;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::set<double> lats, lons;
  std::set<Date> dates;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (detail::trim(lines[i]).empty()) continue;
    auto f = detail::split_csv(lines[i]);
    if (f.size() != 4)
      throw ParseError(fmt::format("line {}: expected 4 fields, found {}", line_no, f.size()), line_no);
    auto date = parse_iso_date(f[0]);
    if (!date) throw ParseError(fmt::format("line {}, column 1: bad date '{}'", line_no, f[0]), line_no, 1);
    double lat = 0, lon = 0, v = 0;
    if (!detail::parse_double(f[1], lat))
      throw ParseError(fmt::format("line {}, column 2: bad latitude '{}'", line_no, f[1]), line_no, 2);
    if (!detail::parse_double(f[2], lon))
      throw ParseError(fmt::format("line {}, column 3: bad longitude '{}'", line_no, f[2]), line_no, 3);
    std::optional<float> value;
    const auto& tokens = default_missing_tokens();
    if (std::find(tokens.begin(), tokens.end(), f[3]) == tokens.end()) {
      if (!detail::parse_double(f[3], v) || !std::isfinite(v) || v < 0.0)
        throw ParseError(fmt::format("line {}, column 4: bad value '{}'", line_no, f[3]), line_no, 4);
      value = static_cast<float>(v);
    }
    rows.push_back({*date, lat, lon, value, line_no});
    lats.insert(lat);
    lons.insert(lon);
    dates.insert(*date);
  }
  if (rows.empty()) throw ParseError("grid CSV has no data rows", lines.size());

  // A single-valued axis borrows the other axis' spacing (or 1 degree).
  Axis lat_axis = infer_axis(lats, "latitude", 1.0);
  Axis lon_axis = infer_axis(lons, "longitude", lat_axis.step);
  if (lats.size() == 1) lat_axis.step = lon_axis.step;

  ImportedGrid g;
  auto& d = g.descriptor;
  d.lat0 = lat_axis.origin;
  d.dlat = lat_axis.step;
  d.nlat = lat_axis.count;
  d.lon0 = lon_axis.origin;
  d.dlon = lon_axis.step;
  d.nlon = lon_axis.count;
  d.time_start = *dates.begin();
  d.ntime = static_cast<int>(days_between(*dates.begin(), *dates.rbegin()) + 1);
  d.missing_sentinel = missing_sentinel;
  d.validate();

  g.values.assign(d.value_count(), static_cast<float>(missing_sentinel));
  std::vector<bool> seen(d.value_count(), false);
  for (const auto& r : rows) {
    const auto t = static_cast<std::size_t>(days_between(d.time_start, r.date));
    const auto row = static_cast<std::size_t>(std::lround((r.lat - d.lat0) / d.dlat));
    const auto col = static_cast<std::size_t>(std::lround((r.lon - d.lon0) / d.dlon));
    const std::size_t idx = (t * static_cast<std::size_t>(d.nlat) + row) * static_cast<std::size_t>(d.nlon) + col;
    if (seen[idx]) throw ParseError(fmt::format("line {}: duplicate (date, lat, lon)", r.line), r.line);
    seen[idx] = true;
    if (r.value) g.values[idx] = *r.value;
  }
  return g;
}

}  // namespace rainval
