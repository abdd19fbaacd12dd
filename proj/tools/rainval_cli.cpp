// rainval: validate gridded rainfall products against rain gauges.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 unreadable or
// invalid input (outputs are still written when the run got that far),
// 4 internal invariant breach.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rainval/errors.hpp"
#include "rainval/grid.hpp"
#include "rainval/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rainval;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

struct CommonArgs {
  std::string config;
  std::string out;
  int jobs = 0;
  bool no_spatial_exclusion = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory (overrides output_dir)");
  cmd->add_option("--jobs", args.jobs, "worker threads (overrides jobs)")->check(CLI::PositiveNumber);
}

RunConfig load(const CommonArgs& args) {
  auto cfg = load_run_config(args.config);
  if (args.jobs > 0) cfg.jobs = args.jobs;
  if (!args.out.empty()) cfg.output_dir = args.out;
  if (args.no_spatial_exclusion) cfg.spatial.exclude_inconsistent = false;
  return cfg;
}

int finish(const ValidationReport& report, const RunConfig& cfg, unsigned outputs) {
  const auto files = emit_outputs(report, cfg.output_dir, outputs);
  for (const auto& s : report.stations)
    if (!s.error.empty()) fmt::print(stderr, "station {}: {}\n", s.meta.station_id, s.error);
  for (const auto& p : report.products)
    if (!p.error.empty()) fmt::print(stderr, "product {}: {}\n", p.meta.product_id, p.error);
  for (const auto& p : report.pairs) fmt::print("{}\t{}\t{}\n", p.station_id, p.product_id, p.status);
  fmt::print("wrote {} files to {}\n", files.size(), cfg.output_dir.string());
  return report.has_input_failures() ? kExitInput : 0;
}

int cmd_qc(const CommonArgs& args) {
  const auto cfg = load(args);
  ValidationReport report;
  report.rain_day_threshold = cfg.rain_day_threshold;
  report.stations = run_qc_stage(cfg);
  for (const auto& s : report.stations) {
    if (s.error.empty())
      fmt::print("{}\tflagged={}\tcompleteness={:.3f}\teligible={}\n", s.meta.station_id, s.qc.total_flagged(),
                 s.qc.completeness_after, s.qc.eligible);
  }
  return finish(report, cfg, kOutputQc | kOutputAnnual);
}

int cmd_spatial(const CommonArgs& args) {
  const auto cfg = load(args);
  ValidationReport report;
  report.rain_day_threshold = cfg.rain_day_threshold;
  report.products = run_spatial_stage(cfg);
  for (const auto& p : report.products) {
    if (p.error.empty())
      fmt::print("{}\tverdict={}\texcluded={}\n", p.meta.product_id,
                 p.verdict ? std::string(to_string(*p.verdict)) : "n/a", p.excluded);
  }
  return finish(report, cfg, kOutputSpatial);
}

int cmd_pipeline(const CommonArgs& args, RunOptions options, unsigned outputs) {
  const auto cfg = load(args);
  if (args.no_spatial_exclusion) options.exclude_inconsistent = false;
  const auto report = run_pipeline(cfg, options);
  return finish(report, cfg, outputs);
}

int cmd_import(const std::string& input, const std::string& out_desc, const std::string& out_payload,
               double sentinel) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw IoError("cannot read " + input);
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto grid = import_long_csv(raw, sentinel);
  {
    std::ofstream d(out_desc, std::ios::binary);
    d << to_json(grid.descriptor);
    if (!d) throw IoError("cannot write " + out_desc);
  }
  const auto bytes = encode_payload(grid.values);
  std::ofstream p(out_payload, std::ios::binary);
  p.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!p) throw IoError("cannot write " + out_payload);
  fmt::print("grid {}x{}x{} written\n", grid.descriptor.ntime, grid.descriptor.nlat, grid.descriptor.nlon);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validate gridded rainfall products against daily rain-gauge records"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* qc = app.add_subcommand("qc", "quality-control every configured station");
  add_common(qc, args);
  auto* spatial = app.add_subcommand("spatial", "climatology fields and blockiness screen per product");
  add_common(spatial, args);
  auto* validate = app.add_subcommand("validate", "full validation run");
  add_common(validate, args);
  auto* seasonal = app.add_subcommand("seasonal", "harmonic occurrence models and threshold sweep");
  add_common(seasonal, args);
  auto* intensity = app.add_subcommand("intensity", "rain-day contingency and intensity-category detection");
  add_common(intensity, args);
  for (auto* cmd : {validate, seasonal, intensity})
    cmd->add_flag("--no-spatial-exclusion", args.no_spatial_exclusion, "keep products the spatial screen rejects");

  auto* grid = app.add_subcommand("grid", "grid utilities");
  grid->require_subcommand(1);
  auto* import_csv = grid->add_subcommand("import-csv", "convert long CSV date,lat,lon,value to descriptor + payload");
  std::string input, out_desc, out_payload;
  double sentinel = -9999.0;
  import_csv->add_option("--input", input, "long-format CSV")->required()->check(CLI::ExistingFile);
  import_csv->add_option("--out-descriptor", out_desc, "descriptor JSON to write")->required();
  import_csv->add_option("--out-payload", out_payload, "float32 payload to write")->required();
  import_csv->add_option("--sentinel", sentinel, "missing-value sentinel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*qc) return cmd_qc(args);
    if (*spatial) return cmd_spatial(args);
    if (*validate) return cmd_pipeline(args, {}, kOutputAll);
    if (*seasonal) {
      RunOptions o;
      o.annual = false;
      o.intensity = false;
      return cmd_pipeline(args, o, kOutputSeasonal);
    }
    if (*intensity) {
      RunOptions o;
      o.annual = false;
      o.seasonal = false;
      return cmd_pipeline(args, o, kOutputIntensity | kOutputQc);
    }
    if (*import_csv) return cmd_import(input, out_desc, out_payload, sentinel);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kExitConfig;
  } catch (const InvariantError& e) {
    fmt::print(stderr, "internal invariant breached: {}\n", e.what());
    return kExitInternal;
  } catch (const Error& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
  return kExitConfig;
}
