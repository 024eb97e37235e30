#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ermlab {

/// Log-log least-squares fit operationalizing scaling-exponent claims.
struct RateFit {
  double exponent = 0.0;   // slope of log(value) on log(n)
  double intercept = 0.0;
  double stderr_exponent = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> n_range{0.0, 0.0};
};

/// OLS of log(value) on log(n). Needs >= 4 pairs with positive values;
/// throws NonPositiveValue otherwise.
RateFit fit_exponent(const std::vector<std::pair<double, double>>& pairs);

}  // namespace ermlab
