#include "ermlab/ratefit.hpp"

#include <cmath>

#include "ermlab/errors.hpp"

namespace ermlab {

RateFit fit_exponent(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4)
    throw ConfigInvalid("pairs", "rate fit needs at least 4 points");
  const std::size_t k = pairs.size();
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(pairs[i].second > 0.0))
      throw NonPositiveValue("rate fit needs positive values (got " +
                             std::to_string(pairs[i].second) + ")");
    if (!(pairs[i].first > 0.0))
      throw NonPositiveValue("rate fit needs positive sample sizes");
    xs[i] = std::log(pairs[i].first);
    ys[i] = std::log(pairs[i].second);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(k);
  my /= double(k);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ss_res += r * r;
  }
  fit.stderr_exponent =
      k > 2 ? std::sqrt(ss_res / double(k - 2) / sxx) : 0.0;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (fit.r_squared < 0.0) fit.r_squared = 0.0;
  fit.n_range = {pairs.front().first, pairs.back().first};
  return fit;
}

}  // namespace ermlab
