#pragma once

#include <optional>
#include <string>

namespace rainval {

/// A metric value that may be undefined for the given input. An absent value
/// always carries a short machine-readable reason such as "zero_variance".
struct Score {
  std::optional<double> value;
  std::string reason;

  static Score of(double v) { return Score{v, {}}; }
  static Score absent(std::string why) { return Score{std::nullopt, std::move(why)}; }

  bool has_value() const { return value.has_value(); }
  explicit operator bool() const { return has_value(); }
  double operator*() const { return *value; }
};

}  // namespace rainval
