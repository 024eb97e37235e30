#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ermlab/classes.hpp"
#include "ermlab/erm.hpp"

namespace ermlab {

/// Monte Carlo estimates of the risk and of every term of the bias-variance
/// and total-variance decompositions, with standard errors.
struct DecompositionReport {
  double risk = 0.0;
  double variance = 0.0;
  double bias_sq = 0.0;
  double cond_var = 0.0;       // E_X V(fhat | X); equals variance in fixed design
  double var_cond_mean = 0.0;  // V(E_xi[fhat | X]); 0 in fixed design

  double se_risk = 0.0;
  double se_variance = 0.0;
  double se_bias_sq = 0.0;
  double se_cond_var = 0.0;
  double se_var_cond_mean = 0.0;

  int replicates_outer = 0;  // R (fixed design) or R_X
  int replicates_inner = 1;  // 1 (fixed design) or R_xi
  std::string norm_used = "empirical";
  Eigen::Index n = 0;
  std::size_t aborted = 0;
  bool diameter_unbounded = false;
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
};

/// Lemma-level sanity floor on the fixed-design risk of a bounded class.
inline bool risk_floor_ok(const DecompositionReport& r) {
  return r.risk >= 1.0 / (32.0 * double(r.n)) - 3.0 * r.se_risk;
}

struct DecompositionOptions {
  double tol = kDefaultTol;
  std::size_t workers = 1;
};

/// Fixed design: R noise replicates at one design; plug-in moments with the
/// R/(R-1) variance correction. Solver errors abort the replicate and are
/// counted; more than 1% aborts throws SolverFailureThreshold.
DecompositionReport fixed_design_decomposition(
    const FunctionClass& cls, const Vector& fstar, const NoiseModel& model,
    int R, std::uint64_t seed, const DecompositionOptions& opts = {});

/// Random design: nested Monte Carlo, outer over designs, inner over noise.
/// Population norms use one fresh covariate batch per outer replicate plus a
/// shared reference batch for the cross-design terms; correlation induced by
/// batch reuse is absorbed into bootstrap standard errors over the outer
/// replicates.
DecompositionReport random_design_decomposition(
    const ClassFamily& family, Eigen::Index n, const PopulationSampler& sampler,
    const FstarRule& fstar, const NoiseModel& model, int R_X, int R_xi,
    Eigen::Index m, std::uint64_t seed, const DecompositionOptions& opts = {});

struct RateScanPoint {
  Eigen::Index n;
  DecompositionReport report;
};

/// Fixed-design decomposition across a strictly increasing grid of sample
/// sizes, same seed policy per point; feeds fit_exponent.
std::vector<RateScanPoint> rate_scan(
    const std::function<ClassPtr(Eigen::Index)>& class_for_n,
    const std::function<Vector(Eigen::Index)>& fstar_for_n,
    const NoiseModel& model, const std::vector<Eigen::Index>& n_grid, int R,
    std::uint64_t seed, const DecompositionOptions& opts = {});

}  // namespace ermlab
