#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "csv.hpp"
#include "rainval/errors.hpp"
#include "rainval/pipeline.hpp"

namespace rainval {

namespace fs = std::filesystem;

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{} must be a mapping", where));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}: invalid value (line {})", where, node.Mark().line + 1));
  }
}

template <typename T>
void read_opt(const YAML::Node& parent, const char* key, const std::string& where, T& out) {
  if (parent[key]) out = scalar<T>(parent[key], where + "." + key);
}

std::set<int> month_set(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ConfigError(where + " must be a list of months");
  std::set<int> out;
  for (const auto& m : node) out.insert(scalar<int>(m, where));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

CountryConfig RunConfig::country(const std::string& name) const {
  auto it = countries.find(name);
  return it == countries.end() ? CountryConfig{} : it->second;
}

void RunConfig::validate() const {
  auto must_exist = [](const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw ConfigError(fmt::format("{} '{}' does not exist", what, p.string()));
  };
  must_exist(station_table, "station table");
  for (const auto& [id, path] : station_series) must_exist(path, "series for station " + id);
  std::set<std::string> ids;
  for (const auto& p : products) {
    if (p.meta.product_id.empty()) throw ConfigError("product without id");
    if (!ids.insert(p.meta.product_id).second) throw ConfigError("duplicate product id " + p.meta.product_id);
    must_exist(p.descriptor, "descriptor of product " + p.meta.product_id);
    must_exist(p.payload, "payload of product " + p.meta.product_id);
  }
  if (station_series.empty()) throw ConfigError("no stations configured");
  if (!(rain_day_threshold > 0.0)) throw ConfigError("rain_day_threshold must be positive");
  if (sweep_thresholds.empty()) throw ConfigError("seasonal.thresholds must not be empty");
  for (std::size_t i = 0; i < sweep_thresholds.size(); ++i) {
    if (!(sweep_thresholds[i] > 0.0)) throw ConfigError("seasonal.thresholds must be positive");
    if (i > 0 && !(sweep_thresholds[i] > sweep_thresholds[i - 1]))
      throw ConfigError("seasonal.thresholds must be strictly increasing");
  }
  if (harmonics < 0 || harmonics > 12) throw ConfigError("seasonal.harmonics must be in [0, 12]");
  if (min_annual_days < 1 || min_annual_days > 366) throw ConfigError("annual.min_days must be in [1, 366]");
  if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0))
    throw ConfigError("extraction.max_missing_fraction must be in [0, 1]");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (spatial.convention.start_month < 1 || spatial.convention.start_month > 12)
    throw ConfigError("spatial.year_start_month must be in [1, 12]");
  if (!(spatial.thresholds.suspicious > 0.0 && spatial.thresholds.inconsistent >= spatial.thresholds.suspicious))
    throw ConfigError("spatial thresholds must satisfy 0 < suspicious <= inconsistent");
  for (const auto& [name, c] : countries) {
    if (c.convention.start_month < 1 || c.convention.start_month > 12)
      throw ConfigError(fmt::format("countries.{}.year_start_month must be in [1, 12]", name));
    QcConfig probe = qc;
    probe.wet_months = c.wet_months;
    try {
      probe.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(fmt::format("countries.{}: {}", name, e.what()));
    }
  }
  try {
    qc.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(std::string_view yaml_text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("config syntax error: {}", e.what()));
  }
  check_keys(root, "config",
             {"station_table", "stations", "products", "countries", "rain_day_threshold", "missing_tokens", "qc",
              "annual", "seasonal", "extraction", "spatial", "output_dir", "jobs"});

  RunConfig cfg;
  if (!root["station_table"]) throw ConfigError("config: station_table is required");
  cfg.station_table = resolve(base_dir, scalar<std::string>(root["station_table"], "station_table"));

  if (!root["stations"] || !root["stations"].IsMap()) throw ConfigError("config: stations must map station -> series");
  for (const auto& kv : root["stations"]) {
    const auto id = kv.first.as<std::string>();
    cfg.station_series[id] = resolve(base_dir, scalar<std::string>(kv.second, "stations." + id));
  }

  if (root["products"]) {
    if (!root["products"].IsSequence()) throw ConfigError("config: products must be a list");
    std::size_t i = 0;
    for (const auto& p : root["products"]) {
      const auto where = fmt::format("products[{}]", i++);
      check_keys(p, where, {"id", "inputs_class", "descriptor", "payload", "spatial_resolution"});
      for (const char* req : {"id", "descriptor", "payload"})
        if (!p[req]) throw ConfigError(fmt::format("{}: '{}' is required", where, req));
      ProductSource src;
      src.meta.product_id = scalar<std::string>(p["id"], where + ".id");
      if (p["inputs_class"]) {
        try {
          src.meta.inputs_class = parse_inputs_class(scalar<std::string>(p["inputs_class"], where + ".inputs_class"));
        } catch (const ValidationError& e) {
          throw ConfigError(fmt::format("{}: {}", where, e.what()));
        }
      }
      read_opt(p, "spatial_resolution", where, src.meta.spatial_resolution);
      src.descriptor = resolve(base_dir, scalar<std::string>(p["descriptor"], where + ".descriptor"));
      src.payload = resolve(base_dir, scalar<std::string>(p["payload"], where + ".payload"));
      cfg.products.push_back(std::move(src));
    }
  }

  if (root["countries"]) {
    if (!root["countries"].IsMap()) throw ConfigError("config: countries must be a mapping");
    for (const auto& kv : root["countries"]) {
      const auto name = kv.first.as<std::string>();
      const auto where = "countries." + name;
      check_keys(kv.second, where, {"year_start_month", "wet_months"});
      CountryConfig c;
      read_opt(kv.second, "year_start_month", where, c.convention.start_month);
      if (kv.second["wet_months"]) c.wet_months = month_set(kv.second["wet_months"], where + ".wet_months");
      cfg.countries[name] = c;
    }
  }

  read_opt(root, "rain_day_threshold", "config", cfg.rain_day_threshold);
  read_opt(root, "jobs", "config", cfg.jobs);
  if (root["output_dir"]) cfg.output_dir = resolve(base_dir, scalar<std::string>(root["output_dir"], "output_dir"));
  else cfg.output_dir = base_dir / cfg.output_dir;
  if (root["missing_tokens"]) {
    if (!root["missing_tokens"].IsSequence()) throw ConfigError("missing_tokens must be a list");
    cfg.missing_tokens.clear();
    for (const auto& t : root["missing_tokens"]) cfg.missing_tokens.push_back(scalar<std::string>(t, "missing_tokens"));
  }

  if (const auto q = root["qc"]) {
    check_keys(q, "qc",
               {"min_run", "min_value", "max_daily", "dry_month_floor", "min_station_years", "eligibility"});
    read_opt(q, "min_run", "qc", cfg.qc.min_run);
    read_opt(q, "min_value", "qc", cfg.qc.min_value);
    read_opt(q, "max_daily", "qc", cfg.qc.max_daily);
    read_opt(q, "dry_month_floor", "qc", cfg.qc.dry_month_floor);
    read_opt(q, "min_station_years", "qc", cfg.qc.min_station_years);
    read_opt(q, "eligibility", "qc", cfg.qc.eligibility);
  }
  if (const auto a = root["annual"]) {
    check_keys(a, "annual", {"min_days", "screening"});
    read_opt(a, "min_days", "annual", cfg.min_annual_days);
    if (a["screening"]) {
      const auto s = scalar<std::string>(a["screening"], "annual.screening");
      if (s == "symmetric") cfg.screening = YearScreening::Symmetric;
      else if (s == "gauge_only") cfg.screening = YearScreening::GaugeOnly;
      else throw ConfigError("annual.screening must be 'symmetric' or 'gauge_only'");
    }
  }
  if (const auto s = root["seasonal"]) {
    check_keys(s, "seasonal", {"harmonics", "thresholds"});
    read_opt(s, "harmonics", "seasonal", cfg.harmonics);
    if (s["thresholds"]) {
      if (!s["thresholds"].IsSequence()) throw ConfigError("seasonal.thresholds must be a list");
      cfg.sweep_thresholds.clear();
      for (const auto& t : s["thresholds"]) cfg.sweep_thresholds.push_back(scalar<double>(t, "seasonal.thresholds"));
    }
  }
  if (const auto e = root["extraction"]) {
    check_keys(e, "extraction", {"max_missing_fraction"});
    read_opt(e, "max_missing_fraction", "extraction", cfg.max_missing_fraction);
  }
  if (const auto s = root["spatial"]) {
    check_keys(s, "spatial", {"enabled", "exclude_inconsistent", "year_start_month", "suspicious", "inconsistent"});
    read_opt(s, "enabled", "spatial", cfg.spatial.enabled);
    read_opt(s, "exclude_inconsistent", "spatial", cfg.spatial.exclude_inconsistent);
    read_opt(s, "year_start_month", "spatial", cfg.spatial.convention.start_month);
    read_opt(s, "suspicious", "spatial", cfg.spatial.thresholds.suspicious);
    read_opt(s, "inconsistent", "spatial", cfg.spatial.thresholds.inconsistent);
  }

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = detail::read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text, path.parent_path());
}

}  // namespace rainval
