// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/ranges.h>

#include "csv.hpp"
#include "rainval/errors.hpp"
#include "rainval/gauge.hpp"
#include "rainval/metrics.hpp"
#include "rainval/pairing.hpp"
#include "rainval/pipeline.hpp"
#include "rainval/seasonal.hpp"
#include "rainval/spatial.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace rainval;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kTmp = RAINVAL_TEST_TMP;

/// Collects the first few failure details of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 5) detail_ << (failures_ > 1 ? "; " : "") << what;
  }
  bool ok() const { return failures_ == 0; }
  std::string detail() const {
    return failures_ > 5 ? fmt::format("{} (+{} more)", detail_.str(), failures_ - 5) : detail_.str();
  }

 private:
  int failures_ = 0;
  std::ostringstream detail_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool close_rel(double got, double want, double rel, double floor = 0.0) {
  return std::abs(got - want) <= rel * std::max(std::abs(want), floor);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// 1. Continuous metrics agree with naive oracles.
void continuous_oracles(Check& c) {
  synth::Rng rng(1001);
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = rng.integer(2, 100);
    const Eigen::VectorXd o = synth::random_rain(rng, n).array() + 0.05;
    const Eigen::VectorXd s = synth::random_rain(rng, n);
    const auto so = to_std(o), ss = to_std(s);
    const double scale = oracle::mean(so) + oracle::mean(ss);
    const double me = *mean_error(s, o), pb = *pbias(s, o), sd = *rsd(s, o);
    const double r = pearson_r(s, o).value.value_or(0.0);
    c.expect(std::abs(me - oracle::me(ss, so)) <= 1e-12 * scale, fmt::format("trial {} me {}", trial, me));
    c.expect(close_rel(pb, oracle::pbias(ss, so), 1e-12, 1e-12 * 100), fmt::format("trial {} pbias {}", trial, pb));
    if (std::ranges::min(ss) == std::ranges::max(ss) || std::ranges::min(so) == std::ranges::max(so)) c.expect(pearson_r(s, o).reason == "zero_variance", "constant input not absent");
    else c.expect(close_rel(r, oracle::pearson(ss, so), 1e-12, 1.0),
             fmt::format("trial {} r {} ({}) n={} s={} o={}", trial, r, pearson_r(s, o).reason, n, ss, so));
    c.expect(close_rel(sd, oracle::rsd(ss, so), 1e-12), fmt::format("trial {} rsd {}", trial, sd));
  }
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 5.0, fmt::format("took {:.2f} s", elapsed));
}

// 2. A uniformly scaled product.
void scaled_product(Check& c) {
  synth::Rng rng(2002);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd o = synth::random_rain(rng, rng.integer(3, 200)).array() + 0.1;
    const Eigen::VectorXd s = 1.2 * o;
    const double pb = *pbias(s, o), sd = *rsd(s, o), r = *pearson_r(s, o);
    c.expect(std::abs(pb - 20.0) <= 1e-12 * 100, fmt::format("pbias {:.17g}", pb));
    c.expect(std::abs(sd - 1.2) <= 1e-12, fmt::format("rsd {:.17g}", sd));
    c.expect(std::abs(r - 1.0) <= 1e-12, fmt::format("r {:.17g}", r));
  }
}

// 3. Intensity classes on a 0.01 mm sweep and at the boundaries.
void intensity_sweep(Check& c) {
  for (long k = 0; k <= 6000; ++k) {
    const double mm = static_cast<double>(k) / 100.0;
    const int got = static_cast<int>(index(classify_intensity(mm)));
    c.expect(got == oracle::category_of_hundredths(k), fmt::format("{} mm -> {}", mm, got));
  }
  const std::pair<double, int> edges[] = {{0.0, 0},  {0.8499999, 0}, {0.85, 1}, {4.9999999, 1}, {5.0, 2},
                                          {19.99999, 2}, {20.0, 3},   {39.99999, 3}, {40.0, 4}, {250.0, 4}};
  for (auto [mm, want] : edges)
    c.expect(static_cast<int>(index(classify_intensity(mm))) == want, fmt::format("edge {}", mm));
}

// 4. Harmonic fit recovers its generator and minimises the deviance.
void harmonic_recovery(Check& c) {
  synth::Rng rng(4004);
  BinaryOccurrenceSeries s;
  for (int y = 0; y < 40; ++y)
    for (int t = 1; t <= kSeasonLength; ++t) {
      s.day_index.push_back(t);
      s.outcome.push_back(rng.bernoulli(synth::occurrence_probability(t)) ? 1 : 0);
    }
  const auto t0 = Clock::now();
  const auto m = fit_occurrence(s, 1);
  const double elapsed = seconds_since(t0);
  c.expect(m.converged, "not converged: " + m.note);
  c.expect(std::abs(m.beta0 + 1.0) <= 0.1, fmt::format("beta0 {:.4f}", m.beta0));
  c.expect(std::abs(m.a[0] - 0.8) <= 0.1, fmt::format("A1 {:.4f}", m.a[0]));
  c.expect(std::abs(m.b[0] - 0.4) <= 0.1, fmt::format("B1 {:.4f}", m.b[0]));
  c.expect(elapsed < 1.0, fmt::format("fit took {:.3f} s", elapsed));

  // Brute-force minimum on a 200-day subset.
  BinaryOccurrenceSeries sub;
  std::vector<int> t, y;
  for (int i = 0; i < 200; ++i) {
    const auto j = static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.size()) - 1));
    sub.day_index.push_back(s.day_index[j]);
    sub.outcome.push_back(s.outcome[j]);
    t.push_back(s.day_index[j]);
    y.push_back(s.outcome[j]);
  }
  const auto fit = fit_occurrence(sub, 1);
  const auto coarse = oracle::grid_search(t, y, {-1.0, 0.8, 0.4}, 1.0, 0.1);
  const auto fine = oracle::grid_search(t, y, coarse.at, 0.15, 0.01);
  const double own = oracle::deviance(t, y, fit.beta0, fit.a[0], fit.b[0]);
  c.expect(own <= fine.deviance + 1e-9, fmt::format("deviance {:.6f} > grid {:.6f}", own, fine.deviance));
  c.expect(std::abs(fit.deviance - own) <= 1e-8 * own, "reported deviance differs from the oracle");
  c.expect(std::abs(fit.beta0 - fine.at[0]) <= 0.02 && std::abs(fit.a[0] - fine.at[1]) <= 0.02 &&
               std::abs(fit.b[0] - fine.at[2]) <= 0.02,
           fmt::format("fit ({:.3f},{:.3f},{:.3f}) vs grid ({:.2f},{:.2f},{:.2f})", fit.beta0, fit.a[0], fit.b[0],
                       fine.at[0], fine.at[1], fine.at[2]));
}

// 5. Intercept-only fit equals the empirical logit.
void intercept_only(Check& c) {
  synth::Rng rng(5005);
  for (int trial = 0; trial < 25; ++trial) {
    BinaryOccurrenceSeries s;
    const double p = rng.uniform(0.05, 0.9);
    const int n = rng.integer(50, 3000);
    std::size_t ones = 0;
    for (int i = 0; i < n; ++i) {
      s.day_index.push_back(rng.integer(1, 365));
      s.outcome.push_back(rng.bernoulli(p) ? 1 : 0);
      ones += s.outcome.back();
    }
    if (ones == 0 || ones == s.size()) continue;
    const double phat = static_cast<double>(ones) / n;
    const auto m = fit_occurrence(s, 0);
    c.expect(std::abs(m.beta0 - std::log(phat / (1.0 - phat))) <= 1e-10,
             fmt::format("trial {} beta0 {:.15g}", trial, m.beta0));
  }
}

// 6. Contingency and decomposition invariants.
void categorical_invariants(Check& c) {
  synth::Rng rng(6006);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = rng.integer(1, 500);
    const Eigen::VectorXd g = synth::random_rain(rng, n), p = synth::random_rain(rng, n);
    const auto t = rain_day_contingency(g, p);
    c.expect(t.total() == static_cast<std::size_t>(n), fmt::format("trial {} total {}", trial, t.total()));
    std::size_t hits = 0, events = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      events += g[i] >= 0.85;
      hits += g[i] >= 0.85 && p[i] >= 0.85;
    }
    const auto pd = pod(t);
    if (events) c.expect(pd && *pd == static_cast<double>(hits) / events, fmt::format("trial {} pod", trial));
    else c.expect(!pd, fmt::format("trial {} pod should be absent", trial));
    for (const auto& row : category_outcome_decomposition(g, p))
      if (row) {
        const double sum = row->true_hit + row->true_miss + row->lower + row->higher;
        c.expect(std::abs(sum - 1.0) <= 1e-12, fmt::format("trial {} row sums to {:.17g}", trial, sum));
      }
  }
}

// 7. A product with drizzle on every dry day matches the gauge best at a
// threshold above the rain-day threshold.
void drizzle_threshold(Check& c) {
  synth::Rng rng(7007);
  const Date start = make_date(1991, 1, 1);
  const auto values = synth::seasonal_values(rng, start, 30 * 365);
  auto drizzled = values;
  for (auto& v : drizzled)
    if (v && *v == 0.0) *v = 1.0;
  const auto gauge = DailySeries::from_values("G", start, values);
  const auto product = DailySeries::from_values("G", start, drizzled);
  const std::vector<double> thresholds{0.85, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
  const auto r = threshold_sweep(product, gauge, thresholds, 3);
  c.expect(r.best_threshold.has_value(), "no best threshold");
  if (r.best_threshold) c.expect(*r.best_threshold > 0.85, fmt::format("best {}", *r.best_threshold));
}

ClimatologyField field_from(int n, const std::function<double(int, int)>& f) {
  ClimatologyField out;
  out.descriptor.nlat = n;
  out.descriptor.nlon = n;
  out.values.resize(n, n);
  out.valid.setConstant(n, n, true);
  for (int r = 0; r < n; ++r)
    for (int col = 0; col < n; ++col) out.values(r, col) = f(r, col);
  return out;
}

// 8. Blockiness separates smooth and tiled fields.
void blockiness_separation(Check& c) {
  const auto smooth =
      blockiness_score(field_from(40, [](int r, int col) { return 900 + 200 * std::sin(r / 9.0) * std::cos(col / 13.0); }));
  const auto tiled =
      blockiness_score(field_from(40, [](int r, int col) { return (r / 4 + col / 4) % 2 ? 1500.0 : 500.0; }));
  c.expect(smooth.verdict == Verdict::Consistent, "smooth field not consistent");
  c.expect(tiled.verdict == Verdict::Inconsistent, "tiled field not inconsistent");
  if (smooth.blockiness && tiled.blockiness)
    c.expect(*tiled.blockiness.value >= 10.0 * *smooth.blockiness.value,
             fmt::format("ratio {:.3g}", *tiled.blockiness.value / *smooth.blockiness.value));
  else c.expect(false, "absent score");
}

std::size_t blocks_with(const DailySeries& s, QcReason r) {
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool hit = s[i].is_flagged() && s[i].reason == r;
    const bool prev = i > 0 && s[i - 1].is_flagged() && s[i - 1].reason == r;
    blocks += hit && !prev;
  }
  return blocks;
}

// 9. QC reasons, boundaries and idempotence.
void qc_rules(Check& c) {
  const Date start = make_date(2000, 1, 1), end = make_date(2005, 12, 31);
  std::string csv = "date,rain_mm\n";
  for (Date d = start; d <= end; d += std::chrono::days{1}) {
    double v = 0.0;
    if (month_of(d) == 1 && year_of(d) < 2005 && day_of(d) % 2 == 0) v = 5.0;
    if (d >= make_date(2001, 3, 10) && d < make_date(2001, 3, 16)) v = 3.0;
    if (d == make_date(2002, 6, 10)) v = 512.0;
    if (d == make_date(2003, 7, 1)) v = -2.0;
    csv += fmt::format("{},{}\n", format_iso_date(d), v);
    if (d == make_date(2004, 8, 15)) csv += fmt::format("{},{}\n", format_iso_date(d), 7.0);
  }
  const auto parsed = parse_daily_series(csv, "Q");
  QcConfig cfg;
  cfg.wet_months = {1};
  const auto r = run_qc(parsed.series, cfg);
  const std::pair<QcReason, std::size_t> expected[] = {{QcReason::ConsecutiveIdentical, 6},
                                                       {QcReason::ExtremeValue, 1},
                                                       {QcReason::SuspiciousDryMonth, 31},
                                                       {QcReason::NegativeValue, 1},
                                                       {QcReason::DuplicateDate, 1}};
  for (auto [reason, days] : expected) {
    c.expect(blocks_with(r.series, reason) == 1, fmt::format("{} blocks {}", to_string(reason), blocks_with(r.series, reason)));
    c.expect(r.report.count(reason) == days, fmt::format("{} days {}", to_string(reason), r.report.count(reason)));
  }
  const auto again = run_qc(r.series, cfg);
  c.expect(again.series == r.series, "qc is not idempotent");

  // Eligibility at exactly 70% complete.
  std::vector<std::optional<double>> v(100, 1.5);
  for (int i = 0; i < 30; ++i) v[static_cast<std::size_t>(i * 3)] = std::nullopt;
  QcConfig flat;
  flat.min_run = 200;
  const auto at = run_qc(DailySeries::from_values("E", make_date(2001, 1, 1), v), flat);
  c.expect(at.report.eligible, fmt::format("70% not eligible ({:.17g})", at.report.completeness_after));
  v[1] = std::nullopt;
  c.expect(!run_qc(DailySeries::from_values("E", make_date(2001, 1, 1), v), flat).report.eligible,
           "69% eligible");

  // A year with exactly 355 valid days counts; 354 does not.
  std::vector<std::optional<double>> year(365, 2.0);
  for (int i = 0; i < 10; ++i) year[static_cast<std::size_t>(i * 20)] = std::nullopt;
  c.expect(annual_summaries(DailySeries::from_values("A", make_date(2001, 1, 1), year))[0].valid, "355 days invalid");
  year[5] = std::nullopt;
  c.expect(!annual_summaries(DailySeries::from_values("A", make_date(2001, 1, 1), year))[0].valid, "354 days valid");
}

// 10. End-to-end run on a synthetic country.
void synthetic_country(Check& c) {
  synth::CountryOptions o;
  o.years = 40;
  o.grid = 8;
  const auto country = synth::write_country(kTmp / "country", o);
  auto cfg = load_run_config(country.config);
  cfg.jobs = 1;

  const auto t0 = Clock::now();
  const auto report = run_pipeline(cfg);
  const auto first = emit_outputs(report, kTmp / "country" / "run1");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 60.0, fmt::format("run took {:.1f} s", elapsed));

  for (const auto& station : country.stations) {
    const auto* id = report.find(station, "identity");
    const auto* dz = report.find(station, "drizzle");
    if (!id || !dz || !id->scored() || !dz->scored()) {
      c.expect(false, station + " pair not scored");
      continue;
    }
    const auto& pid = id->annual_scores[1].pbias;
    const auto& pdz = dz->annual_scores[1].pbias;
    c.expect(pid && pdz && *pdz > *pid, station + " rain-day pbias not larger for drizzle");
    const auto& did = id->category_pod[index(IntensityCategory::Dry)];
    const auto& ddz = dz->category_pod[index(IntensityCategory::Dry)];
    c.expect(did && ddz && *ddz < *did, station + " dry pod not lower for drizzle");
  }

  const auto second = emit_outputs(run_pipeline(cfg), kTmp / "country" / "run2");
  c.expect(first.size() == second.size(), "different file sets");
  for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i)
    c.expect(first[i].filename() == second[i].filename() &&
                 detail::read_text_file(first[i]) == detail::read_text_file(second[i]),
             first[i].filename().string() + " differs");
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)(Check&)> criteria[] = {
      {"continuous metrics match naive oracles", continuous_oracles},
      {"scaled product gives pbias 20, rsd 1.2, r 1", scaled_product},
      {"intensity classes on a 0.01 mm sweep", intensity_sweep},
      {"harmonic fit recovers generator and minimises deviance", harmonic_recovery},
      {"intercept-only fit is the empirical logit", intercept_only},
      {"contingency partitions, pod recount, decomposition sums", categorical_invariants},
      {"drizzle product best threshold exceeds 0.85", drizzle_threshold},
      {"blockiness separates smooth and tiled fields", blockiness_separation},
      {"qc reasons, inclusive boundaries, idempotence", qc_rules},
      {"synthetic country end to end", synthetic_country},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    if (c.ok()) {
      std::cout << fmt::format("PASS criterion {}: {}\n", n, name);
    } else {
      ++failed;
      std::cout << fmt::format("FAIL criterion {}: {} [{}]\n", n, name, c.detail());
    }
  }
  std::cout.flush();
  return failed == 0 ? 0 : 1;
}
