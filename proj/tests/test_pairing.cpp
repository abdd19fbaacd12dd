#include <doctest.h>

#include "rainval/pairing.hpp"
#include "support/synth.hpp"

using namespace rainval;

TEST_CASE("align keeps days observed by both") {
  auto g = DailySeries::from_values("G", make_date(2000, 1, 1), {1.0, std::nullopt, 3.0, 4.0});
  auto p = DailySeries::from_values("P", make_date(2000, 1, 2), {2.0, 3.5, std::nullopt, 9.0});
  auto a = align(g, p, "prod");
  REQUIRE(a.size() == 1);
  CHECK(a.days[0].date == make_date(2000, 1, 3));
  CHECK(a.days[0].gauge_mm == 3.0);
  CHECK(a.days[0].product_mm == 3.5);
  CHECK(a.station_id == "G");
  CHECK(a.product_id == "prod");

  auto later = DailySeries::from_values("P", make_date(2001, 1, 1), {1.0});
  CHECK(align(g, later).empty());
}

TEST_CASE("accounting years") {
  const YearConvention water{8};
  CHECK(assign_year(make_date(2000, 7, 31), water) == 1999);
  CHECK(assign_year(make_date(2000, 8, 1), water) == 2000);
  CHECK(year_start(2000, water) == make_date(2000, 8, 1));
  CHECK(year_end(2000, water) == make_date(2001, 7, 31));
  CHECK(assign_year(make_date(2000, 1, 1), {}) == 2000);
  CHECK(year_end(2000, {}) == make_date(2000, 12, 31));
}

TEST_CASE("annual summaries") {
  const Date start = make_date(2001, 1, 1);
  std::vector<std::optional<double>> v(365, 0.0);
  v[0] = 0.85;
  v[1] = 0.84;
  v[2] = 10.0;
  for (int i = 100; i < 110; ++i) v[static_cast<std::size_t>(i)] = std::nullopt;
  auto s = annual_summaries(DailySeries::from_values("G", start, v));
  REQUIRE(s.size() == 1);
  CHECK(s[0].year_label == 2001);
  CHECK(s[0].total_rain == doctest::Approx(11.69));
  CHECK(s[0].rain_days == 2);
  CHECK(*s[0].mean_rain_per_rain_day == doctest::Approx(5.425));
  CHECK(s[0].n_valid_days == 355);
  CHECK(s[0].valid);  // 355 observed days is enough

  v[200] = std::nullopt;
  auto short_year = annual_summaries(DailySeries::from_values("G", start, v));
  CHECK(short_year[0].n_valid_days == 354);
  CHECK_FALSE(short_year[0].valid);

  auto dry = annual_summaries(DailySeries::from_values("G", start, std::vector<std::optional<double>>(365, 0.0)));
  CHECK_FALSE(dry[0].mean_rain_per_rain_day.has_value());
}

TEST_CASE("water-year labels split a calendar record") {
  std::vector<std::optional<double>> v(731, 1.0);
  auto s = annual_summaries(DailySeries::from_values("G", make_date(2000, 1, 1), v), 0.85, {8});
  REQUIRE(s.size() == 3);
  CHECK(s[0].year_label == 1999);
  CHECK(s[0].n_valid_days == 213);  // Jan-Jul 2000 (leap year)
  CHECK(s[1].year_label == 2000);
  CHECK(s[1].n_valid_days == 365);
  CHECK(s[2].n_valid_days == 153);
}

TEST_CASE("paired annual join and screening") {
  auto mk = [](int y, double total, int days, bool valid) {
    AnnualSummary s;
    s.year_label = y;
    s.total_rain = total;
    s.rain_days = days;
    if (days > 0) s.mean_rain_per_rain_day = total / days;
    s.valid = valid;
    return s;
  };
  std::vector<AnnualSummary> g{mk(2000, 800, 80, true), mk(2001, 700, 70, true), mk(2002, 900, 0, true),
                               mk(2003, 500, 50, false)};
  std::vector<AnnualSummary> p{mk(2000, 850, 90, true), mk(2001, 650, 60, false), mk(2002, 950, 95, true),
                               mk(2003, 520, 52, true)};
  auto sym = paired_annual(g, p);
  CHECK(sym[0].years == std::vector<int>{2000, 2002});
  CHECK(sym[2].years == std::vector<int>{2000});  // 2002 gauge has no rain day
  auto loose = paired_annual(g, p, YearScreening::GaugeOnly);
  CHECK(loose[0].years == std::vector<int>{2000, 2001, 2002});
  CHECK(loose[1].gauge[1] == 70.0);
  CHECK(loose[1].product[1] == 60.0);
  CHECK(sym[0].sufficient());
  CHECK_FALSE(sym[2].sufficient());
}

TEST_CASE("property: summaries partition the observed record") {
  synth::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Date start = make_date(1995, static_cast<unsigned>(rng.integer(1, 12)), static_cast<unsigned>(rng.integer(1, 28)));
    const int n = rng.integer(1, 2000);
    auto v = synth::seasonal_values(rng, start, n);
    for (auto& x : v)
      if (rng.bernoulli(0.1)) x = std::nullopt;
    const auto series = DailySeries::from_values("G", start, v);
    const YearConvention conv{rng.integer(1, 12)};
    const auto s = annual_summaries(series, 0.85, conv);
    double total = 0.0, expect_total = 0.0;
    int valid_days = 0;
    for (const auto& a : s) {
      total += a.total_rain;
      valid_days += a.n_valid_days;
      CHECK(a.n_valid_days <= 366);
    }
    for (const auto& x : v)
      if (x) expect_total += *x;
    CHECK(total == doctest::Approx(expect_total));
    CHECK(valid_days == static_cast<int>(series.observed_count()));
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].year_label == s[i - 1].year_label + 1);
  }
}
