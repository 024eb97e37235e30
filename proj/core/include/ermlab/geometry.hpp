#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ermlab/classes.hpp"

namespace ermlab {

/// log N(epsilon): either an analytic form or an empirical table of greedy
/// net sizes, monotone-regularized so bisection sees a nonincreasing curve.
class EntropyCurve {
public:
  /// log N(eps) = a * eps^(-p).
  static EntropyCurve power_law(double a, double p);
  /// log N(eps) = a * ln(1/eps), floored at 0.
  static EntropyCurve logarithmic(double a);
  static EntropyCurve zero();
  /// From (epsilon, log_count) samples; applies a running max toward
  /// epsilon -> 0 and clamps to the end values outside the grid.
  static EntropyCurve empirical(std::vector<std::pair<double, double>> table);

  double operator()(double eps) const { return eval_(eps); }
  const std::string& description() const { return description_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

private:
  std::function<double(double)> eval_;
  std::string description_;
  std::vector<std::pair<double, double>> table_;
};

struct GeometryReport {
  double eps_star = 0.0;
  double eps_u = 0.0;
  double eps_v = 0.0;
  double i_lower = 0.0;  // lower isometry remainder I_L
  double i_upper = 0.0;  // upper isometry remainder I_U
  double confidence = 0.0;  // quantile level used, 1 - 1/n
  bool estimate_is_lower_bound = true;  // sampled-pair maximization only
};

/// Farthest-point greedy net over a pool of sampled members: every pool
/// member ends within epsilon (empirical norm) of a center and centers are
/// pairwise more than epsilon apart, so the count also lower-bounds packing.
std::vector<Vector> greedy_net(const FunctionClass& cls, double epsilon,
                               std::size_t pool_size, std::uint64_t seed);

/// Greedy net over an explicit pool (already-sampled members).
std::vector<Vector> greedy_net_pool(const std::vector<Vector>& pool,
                                    double epsilon);

/// Builds an empirical entropy curve from greedy counts on a grid of scales.
EntropyCurve empirical_entropy_curve(const FunctionClass& cls,
                                     const std::vector<double>& eps_grid,
                                     std::size_t pool_size, std::uint64_t seed);

/// Solves log N(eps) = c n eps^2 by bisection on the monotone crossing;
/// tolerance 1e-6 in eps. Throws NoCrossing when the curve never crosses.
double solve_balancing(const EntropyCurve& curve, double n, double c = 1.0);

/// Solves I_U log N(eps) = c n eps^4 (the quartic balancing); returns
/// eps_u = max(eps_star, eps_tilde) and eps_v^2 = max(eps_u^2, i_lower).
struct EpsilonUResult {
  double eps_tilde = 0.0;
  double eps_u = 0.0;
  double eps_v = 0.0;
};
EpsilonUResult solve_epsilon_u(const EntropyCurve& curve, double n,
                               double i_upper, double eps_star,
                               double i_lower, double c = 1.0);

struct IsometryDetail {
  double i_lower = 0.0;
  double i_upper = 0.0;
  std::vector<double> per_design_lower;  // I_L(X) per design replicate
  std::vector<double> per_design_upper;
  double confidence = 0.0;
  bool estimate_is_lower_bound = true;
};

/// Sampled-pair estimates of the isometry remainders: per design the max
/// over member pairs of (pop/2 - emp)+ and (emp/2 - pop)+, then the
/// (1 - 1/n) interpolated quantile over design replicates. Lower bounds of
/// the true remainders by construction.
IsometryDetail isometry_remainders(const ClassFamily& family,
                                   const PopulationSampler& sampler,
                                   Eigen::Index n, std::size_t pair_count,
                                   std::size_t design_replicates,
                                   Eigen::Index batch_m, std::uint64_t seed,
                                   std::size_t pool_size = 256,
                                   std::size_t workers = 1);

/// Population diameter of the set of class functions interpolating fstar at
/// the design (exact interpolator envelopes, Monte Carlo population norm).
/// Returns +inf when the interpolator set is unbounded.
double generalization_diameter(const FunctionClass& cls,
                               const PopulationSampler& sampler,
                               const Vector& fstar_values, Eigen::Index m,
                               std::uint64_t seed);

}  // namespace ermlab
