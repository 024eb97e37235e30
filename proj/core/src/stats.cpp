#include "ermlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ermlab {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / double(n - 1);
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  return std::sqrt(sample_variance(xs) / double(xs.size()));
}

MeanSe mean_se(const std::vector<double>& xs) {
  return {mean(xs), standard_error(xs)};
}

double quantile(std::vector<double> xs, double level) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
  level = std::clamp(level, 0.0, 1.0);
  std::sort(xs.begin(), xs.end());
  const double pos = level * double(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - double(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic of empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = double(i) / double(a.size());
    const double fb = double(j) / double(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

double ks_critical(double alpha, std::size_t n) {
  // c(alpha) = sqrt(-ln(alpha/2)/2); two-sample equal sizes.
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  return c * std::sqrt(2.0 / double(n));
}

}  // namespace ermlab
