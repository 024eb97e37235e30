#pragma once

#include <cstddef>
#include <vector>

namespace ermlab {

/// Sample mean.
double mean(const std::vector<double>& xs);

/// Unbiased sample variance (n-1 denominator); 0 for fewer than 2 points.
double sample_variance(const std::vector<double>& xs);

/// Standard error of the mean: sd / sqrt(n).
double standard_error(const std::vector<double>& xs);

/// Empirical quantile with linear interpolation between order statistics.
/// level in [0, 1]; level 0 gives the minimum, 1 the maximum.
double quantile(std::vector<double> xs, double level);

/// Two-sample Kolmogorov-Smirnov statistic sup_t |F1(t) - F2(t)|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Critical value for the two-sample KS test at significance alpha, equal
/// sample sizes n: c(alpha) * sqrt(2/n).
double ks_critical(double alpha, std::size_t n);

struct MeanSe {
  double value = 0.0;
  double se = 0.0;
};

/// Mean and standard error in one pass.
MeanSe mean_se(const std::vector<double>& xs);

}  // namespace ermlab
