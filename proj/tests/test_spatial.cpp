#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "rainval/spatial.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace rainval;

namespace {

ClimatologyField field_from(int nlat, int nlon, const std::function<double(int, int)>& f) {
  ClimatologyField out;
  out.descriptor.nlat = nlat;
  out.descriptor.nlon = nlon;
  out.values.resize(nlat, nlon);
  out.valid.setConstant(nlat, nlon, true);
  for (int r = 0; r < nlat; ++r)
    for (int c = 0; c < nlon; ++c) out.values(r, c) = f(r, c);
  return out;
}

/// Independent blockiness: median neighbour residual over the field IQR.
double blockiness_oracle(const ClimatologyField& f) {
  std::vector<double> res, all;
  for (int r = 0; r < f.values.rows(); ++r)
    for (int c = 0; c < f.values.cols(); ++c) {
      if (!f.valid(r, c)) continue;
      all.push_back(f.values(r, c));
      if (r == 0 || c == 0 || r + 1 == f.values.rows() || c + 1 == f.values.cols()) continue;
      double s = 0;
      int n = 0;
      for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}})
        if (f.valid(r + dr, c + dc)) {
          s += f.values(r + dr, c + dc);
          ++n;
        }
      if (n) res.push_back(std::abs(f.values(r, c) - s / n));
    }
  std::sort(all.begin(), all.end());
  auto q = [&](double p) {
    const double h = (all.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    return lo + 1 < all.size() ? all[lo] + (h - lo) * (all[lo + 1] - all[lo]) : all[lo];
  };
  return oracle::median(res) / (q(0.75) - q(0.25));
}

}  // namespace

TEST_CASE("quantile matches linear interpolation") {
  CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(quantile({5}, 0.75) == 5.0);
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
}

TEST_CASE("field families") {
  SUBCASE("plane has no residual") {
    const auto s = blockiness_score(field_from(10, 10, [](int r, int c) { return 3.0 * r - 2.0 * c; }));
    CHECK(*s.blockiness.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.verdict == Verdict::Consistent);
    CHECK(s.n_cells == 64);
  }
  SUBCASE("smooth curved field is consistent") {
    const auto s = blockiness_score(field_from(30, 30, [](int r, int c) { return std::sin(r / 8.0) + std::cos(c / 11.0); }));
    CHECK(*s.blockiness.value > 0.0);
    CHECK(s.verdict == Verdict::Consistent);
  }
  SUBCASE("tile checkerboard is inconsistent") {
    // Per 4x4 tile: 4 inner cells score 0, 8 edge cells 1000/4, 4 corners
    // 1000/2. Median 250 over an IQR of 1000.
    const auto s = blockiness_score(field_from(40, 40, [](int r, int c) { return (r / 4 + c / 4) % 2 ? 1500.0 : 500.0; }));
    CHECK(*s.blockiness.value == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(s.verdict == Verdict::Inconsistent);
  }
  SUBCASE("random tile levels are flagged but milder") {
    // Neighbouring tiles differ by less than the full range on average.
    synth::Rng rng(1);
    std::vector<double> tiles(100);
    for (auto& t : tiles) t = rng.uniform(0, 10);
    const auto s = blockiness_score(field_from(40, 40, [&](int r, int c) { return tiles[(r / 4) * 10 + c / 4]; }));
    CHECK(s.verdict == Verdict::Suspicious);
  }
  SUBCASE("constant field has zero iqr") {
    const auto s = blockiness_score(field_from(6, 6, [](int, int) { return 7.0; }));
    CHECK(*s.blockiness.value == 0.0);
  }
  SUBCASE("too small") {
    CHECK(blockiness_score(field_from(4, 9, [](int r, int) { return r; })).blockiness.reason ==
          "grid_smaller_than_5x5");
    auto f = field_from(5, 5, [](int r, int c) { return r * c; });
    f.valid(2, 2) = false;
    const auto s = blockiness_score(f);
    CHECK(s.blockiness.reason == "too_few_interior_cells");
    CHECK_FALSE(s.verdict.has_value());
  }
}

TEST_CASE("property: blockiness equals the oracle") {
  synth::Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int nlat = rng.integer(5, 25), nlon = rng.integer(5, 25);
    auto f = field_from(nlat, nlon, [&](int, int) { return rng.gamma(2.0, 100.0); });
    for (int k = 0; k < nlat * nlon / 10; ++k) f.valid(rng.integer(0, nlat - 1), rng.integer(0, nlon - 1)) = false;
    const auto s = blockiness_score(f);
    if (!s.blockiness) continue;
    CHECK(*s.blockiness.value == doctest::Approx(blockiness_oracle(f)).epsilon(1e-12));
  }
}

TEST_CASE("climatology from a product") {
  // 5x5 cells over two calendar years; cell (r,c) rains r+c mm every day.
  GridDescriptor d;
  d.nlat = 5;
  d.nlon = 5;
  d.time_start = make_date(2001, 1, 1);
  d.ntime = 730;
  std::vector<float> v(d.value_count());
  for (int t = 0; t < d.ntime; ++t)
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c) v[static_cast<std::size_t>((t * 5 + r) * 5 + c)] = static_cast<float>(r + c);
  v[static_cast<std::size_t>((0 * 5 + 4) * 5 + 4)] = -9999.0f;  // one missing day in the corner
  for (int t = 0; t < d.ntime; ++t) v[static_cast<std::size_t>((t * 5 + 0) * 5 + 1)] = -9999.0f;
  const GriddedProduct p({}, d, v);

  const auto fields = climatology_fields(p);
  CHECK(fields[0].values(2, 3) == doctest::Approx(5.0 * 365));
  CHECK(fields[1].values(2, 3) == 365.0);
  CHECK(fields[2].values(2, 3) == 5.0);
  CHECK(fields[0].values(4, 4) == doctest::Approx(8.0 * (364 + 365) / 2.0));
  CHECK(fields[1].values(0, 0) == 0.0);  // dry cell: zero rain days
  CHECK_FALSE(fields[2].valid(0, 0));    // and no mean per rain day
  CHECK_FALSE(fields[0].valid(0, 1));    // never observed
  CHECK(fields[0].valid_count() == 24);

  const auto single = climatology_field(p, ClimatologyKind::MeanRainPerRainDay);
  CHECK(single.values(3, 3) == 6.0);

  const auto csv = field_to_csv(fields[0]);
  CHECK(csv.rfind("lat,lon,value\n0,0,0\n0,1,\n", 0) == 0);
}

TEST_CASE("svg heatmap") {
  auto f = field_from(2, 3, [](int r, int c) { return r * 3 + c; });
  f.valid(1, 2) = false;
  const auto svg = render_svg_heatmap(f, "a<b");
  CHECK(svg.find("width=\"36\" height=\"48\"") != std::string::npos);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg.find("#ffffcc") != std::string::npos);
  CHECK(svg.find("#0c2c84") != std::string::npos);
  CHECK(svg.find("#d9d9d9") != std::string::npos);
  // Row 0 (southernmost) is drawn at the bottom.
  CHECK(svg.find("<rect x=\"0\" y=\"36\" width=\"12\" height=\"12\" fill=\"#ffffcc\"/>") != std::string::npos);
}
