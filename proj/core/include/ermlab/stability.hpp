#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ermlab/classes.hpp"
#include "ermlab/decomposition.hpp"
#include "ermlab/erm.hpp"

namespace ermlab {

/// The paper-side absolute constants are configuration here; every reported
/// radius states the constants used.
struct StabilityConfig {
  double M = 4.0;        // rho_S perturbation-ball multiplier
  double M_prime = 8.0;  // O_delta multiplier for rho_O
  double c_I = 0.1;      // interpolation-event exponent constant
  double c_2 = 0.05;     // rho_S probability exponent
  int probe_directions = 64;

  void validate() const;
};

struct ODeltaProbe {
  double diameter = 0.0;        // lower bound, empirical norm
  std::vector<Vector> probes;   // certified O_delta members found
};

/// Diameter of O_delta = F_n ∩ {||y - f||_n^2 <= loss + delta}, probed by
/// projecting far points along random directions onto the convex body
/// (Dykstra between class and loss ball). Lower bound, monotone in
/// `directions`.
ODeltaProbe o_delta_diameter(const FunctionClass& cls,
                             const ErmSolution& solution, double delta,
                             int directions, std::uint64_t seed,
                             double tol = kDefaultTol);

/// Same probe measured in the population norm on m fresh covariates.
ODeltaProbe o_delta_diameter_population(const FunctionClass& cls,
                                        const ErmSolution& solution,
                                        double delta, int directions,
                                        std::uint64_t seed,
                                        const PopulationSampler& sampler,
                                        Eigen::Index m,
                                        double tol = kDefaultTol);

/// Stability radius of the solution map under noise perturbations within
/// the ball of empirical radius M * eps_star: the quantile, at probability
/// level exp(-c_2 n eps_star^2) clamped to [1/R_outer, 1], of the worst
/// observed squared movement per noise draw. Finitely many perturbations per
/// draw over-estimate robustness; the report direction is documented.
double estimate_rho_s(const FunctionClass& cls, const Vector& fstar,
                      const NoiseModel& model, const StabilityConfig& config,
                      double eps_star, int R_outer, int R_inner,
                      std::uint64_t seed,
                      const PopulationSampler* sampler = nullptr,
                      Eigen::Index m = 0, double tol = kDefaultTol);

/// Probabilistic threshold for the population diameter of O at
/// delta = M' eps_star^2: squared quantile of the per-replicate diameter at
/// level 2 exp(-c_I n eps_star^2), clamped to [1/R, 1].
double estimate_rho_o(const ClassFamily& family, Eigen::Index n,
                      const PopulationSampler& sampler, const FstarRule& fstar,
                      const NoiseModel& model, const StabilityConfig& config,
                      double eps_star, int R, Eigen::Index m,
                      std::uint64_t seed, double tol = kDefaultTol);

struct JaggedSummary {
  std::vector<double> distance;     // ||fhat(xi) - fhat(-xi)||_n per replicate
  std::vector<double> excess;       // empirical-loss excess of fhat(-xi) under xi
  std::vector<double> norm_plus;    // ||fhat(xi) - fstar||_n
  std::vector<double> norm_minus;   // ||fhat(-xi) - fstar||_n
  double distance_median = 0.0;
  double distance_q90 = 0.0;
  double excess_median = 0.0;
  double excess_q90 = 0.0;
  double exceed_fraction = 0.0;  // fraction with excess >= C eps_star^2
  double ks_symmetry = 0.0;      // two-sample KS of norm_plus vs norm_minus
};

/// Flipped-noise probe: compares the ERM at xi and at -xi and measures how
/// far the flipped solution is from minimizing the original loss.
JaggedSummary jagged_probe(const FunctionClass& cls, const Vector& fstar,
                           const NoiseModel& model, int R, std::uint64_t seed,
                           double eps_star = 0.0, double C = 1.0,
                           double tol = kDefaultTol, std::size_t workers = 1);

struct FixedPointResult {
  Vector fstar;
  double residual = 0.0;
  int iterations = 0;
  DecompositionReport report;  // decomposition at the fixed point
  bool success = false;        // bias_sq <= 0.1 variance + 3 SE
};

/// Iterates f <- project(mean of fhat(f + xi)) to find the self-consistent
/// regression function with E fhat = fstar; fresh seed block per iteration.
/// Throws NonConvergence when max_iter passes without the residual reaching
/// tol_fp.
FixedPointResult fixed_point_search(const FunctionClass& cls,
                                    const NoiseModel& model, int R_inner,
                                    int max_iter, double tol_fp,
                                    std::uint64_t seed,
                                    std::optional<Vector> start = std::nullopt,
                                    int R_report = 2000,
                                    double tol = kDefaultTol,
                                    std::size_t workers = 1);

/// Everything the stability experiment emits.
struct StabilityReport {
  double o_delta_diameter = 0.0;
  double o_delta_diameter_se = 0.0;
  double rho_s = 0.0;
  double rho_o = 0.0;
  StabilityConfig config;
  double eps_star = 0.0;
  bool diameter_unbounded = false;
};

}  // namespace ermlab
