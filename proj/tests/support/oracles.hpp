#pragma once

// Deliberately naive reference implementations. None of them share code with
// the library beyond plain data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rainval/grid.hpp"

namespace oracle {

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline double mean(const std::vector<double>& v) { return sum(v) / static_cast<double>(v.size()); }

inline double me(const std::vector<double>& s, const std::vector<double>& o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] - o[i];
  return acc / static_cast<double>(s.size());
}

inline double pbias(const std::vector<double>& s, const std::vector<double>& o) {
  double diff = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    diff += s[i] - o[i];
    tot += o[i];
  }
  return 100.0 * diff / tot;
}

inline double pearson(const std::vector<double>& s, const std::vector<double>& o) {
  const double ms = mean(s), mo = mean(o);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxy += (s[i] - ms) * (o[i] - mo);
    sxx += (s[i] - ms) * (s[i] - ms);
    syy += (o[i] - mo) * (o[i] - mo);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double sample_sd(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double rsd(const std::vector<double>& s, const std::vector<double>& o) { return sample_sd(s) / sample_sd(o); }

/// Category by integer hundredths of a millimetre.
inline int category_of_hundredths(long h) {
  if (h < 85) return 0;
  if (h < 500) return 1;
  if (h < 2000) return 2;
  if (h < 4000) return 3;
  return 4;
}

/// Category by comparison chain written independently of the bound table.
inline int category_of(double mm) {
  int c = 0;
  if (mm >= 0.85) c = 1;
  if (mm >= 5.0) c = 2;
  if (mm >= 20.0) c = 3;
  if (mm >= 40.0) c = 4;
  return c;
}

inline double haversine(double lat1, double lon1, double lat2, double lon2) {
  const double k = std::numbers::pi / 180.0;
  const double dphi = (lat2 - lat1) * k, dl = (lon2 - lon1) * k;
  const double a = std::pow(std::sin(dphi / 2), 2) + std::cos(lat1 * k) * std::cos(lat2 * k) * std::pow(std::sin(dl / 2), 2);
  return 2.0 * 6371.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

struct Cell {
  int row, col;
  double km;
};

/// Exhaustive scan in row-major order; later cells win only when closer by
/// more than 1e-9 km.
inline Cell nearest(const rainval::GridDescriptor& d, double lat, double lon) {
  Cell best{0, 0, std::numeric_limits<double>::infinity()};
  for (int r = 0; r < d.nlat; ++r)
    for (int c = 0; c < d.nlon; ++c) {
      const double km = haversine(lat, lon, d.lat0 + r * d.dlat, d.lon0 + c * d.dlon);
      if (km < best.km - 1e-9) best = {r, c, km};
    }
  return best;
}

/// Bernoulli deviance summed observation by observation.
inline double deviance(const std::vector<int>& t, const std::vector<int>& y, double b0, double a1, double b1) {
  double dev = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = 2.0 * std::numbers::pi * t[i] / 365.0;
    const double eta = b0 + a1 * std::cos(w) + b1 * std::sin(w);
    const double p = 1.0 / (1.0 + std::exp(-eta));
    dev -= 2.0 * (y[i] ? std::log(p) : std::log1p(-p));
  }
  return dev;
}

struct GridMin {
  std::array<double, 3> at{};
  double deviance = std::numeric_limits<double>::infinity();
};

/// Minimises the deviance over a regular grid of spacing `step` inside the box
/// centre +- half_width.
inline GridMin grid_search(const std::vector<int>& t, const std::vector<int>& y, std::array<double, 3> centre,
                           double half_width, double step) {
  GridMin best;
  const int n = static_cast<int>(std::lround(half_width / step));
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      for (int k = -n; k <= n; ++k) {
        const std::array<double, 3> p{centre[0] + i * step, centre[1] + j * step, centre[2] + k * step};
        const double dev = deviance(t, y, p[0], p[1], p[2]);
        if (dev < best.deviance) best = {p, dev};
      }
  return best;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
