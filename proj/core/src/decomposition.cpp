#include "ermlab/decomposition.hpp"

#include <array>
#include <atomic>
#include <cmath>

#include "ermlab/errors.hpp"
#include "ermlab/parallel.hpp"
#include "ermlab/rng.hpp"
#include "ermlab/stats.hpp"

namespace ermlab {

DecompositionReport fixed_design_decomposition(const FunctionClass& cls,
                                               const Vector& fstar,
                                               const NoiseModel& model, int R,
                                               std::uint64_t seed,
                                               const DecompositionOptions& opts) {
  if (R < 2) throw ConfigInvalid("R", "needs at least 2 replicates");
  const Eigen::Index n = cls.n();
  if (fstar.size() != n)
    throw DimensionMismatch(std::size_t(n), std::size_t(fstar.size()));

  Matrix fhats(R, n);
  std::vector<char> ok(std::size_t(R), 0);
  std::atomic<std::size_t> aborted{0};

  SolveOptions solve_opts;
  solve_opts.tol = opts.tol;
  solve_opts.certify_probes = 0;

  parallel_for(std::size_t(R), opts.workers, [&](std::size_t r) {
    const Vector xi = generate_noise(model, n, seed + r);
    try {
      fhats.row(Eigen::Index(r)) =
          solve_erm(cls, fstar, xi, solve_opts).fhat.transpose();
      ok[r] = 1;
    } catch (const NonConvergence&) {
      aborted.fetch_add(1);
    }
  });

  const std::size_t failed = aborted.load();
  if (failed * 100 > std::size_t(R))
    throw SolverFailureThreshold(failed, std::size_t(R));

  std::vector<Eigen::Index> rows;
  rows.reserve(std::size_t(R));
  for (std::size_t r = 0; r < std::size_t(R); ++r)
    if (ok[r]) rows.push_back(Eigen::Index(r));
  const double Rn = double(rows.size());

  Vector mean_fhat = Vector::Zero(n);
  for (Eigen::Index r : rows) mean_fhat += fhats.row(r).transpose();
  mean_fhat /= Rn;

  std::vector<double> risks, spreads, bias_terms;
  risks.reserve(rows.size());
  spreads.reserve(rows.size());
  bias_terms.reserve(rows.size());
  const Vector bias_vec = mean_fhat - fstar;
  for (Eigen::Index r : rows) {
    const Vector f = fhats.row(r).transpose();
    risks.push_back(sq_norm_n(f - fstar));
    spreads.push_back(sq_norm_n(f - mean_fhat));
    bias_terms.push_back(2.0 * dot_n(f - mean_fhat, bias_vec));
  }

  DecompositionReport rep;
  rep.n = n;
  rep.replicates_outer = int(rows.size());
  rep.replicates_inner = 1;
  rep.norm_used = "empirical";
  rep.aborted = failed;
  rep.diameter_unbounded = cls.diameter_unbounded();
  rep.tol = opts.tol;
  rep.seed = seed;

  const auto risk_ms = mean_se(risks);
  rep.risk = risk_ms.value;
  rep.se_risk = risk_ms.se;

  const auto spread_ms = mean_se(spreads);
  rep.variance = spread_ms.value * Rn / (Rn - 1.0);
  rep.se_variance = spread_ms.se * Rn / (Rn - 1.0);

  rep.bias_sq = std::max(0.0, sq_norm_n(bias_vec) - rep.variance / Rn);
  rep.se_bias_sq = standard_error(bias_terms);

  rep.cond_var = rep.variance;
  rep.se_cond_var = rep.se_variance;
  rep.var_cond_mean = 0.0;
  rep.se_var_cond_mean = 0.0;
  return rep;
}

DecompositionReport random_design_decomposition(
    const ClassFamily& family, Eigen::Index n, const PopulationSampler& sampler,
    const FstarRule& fstar, const NoiseModel& model, int R_X, int R_xi,
    Eigen::Index m, std::uint64_t seed, const DecompositionOptions& opts) {
  if (R_X < 2 || R_xi < 2)
    throw ConfigInvalid("replicates", "R_X and R_xi must both be >= 2");
  if (m < 2) throw ConfigInvalid("m", "population batch needs m >= 2");
  if (!fstar.population_evaluable())
    throw ConfigInvalid("fstar", "random design needs an evaluable rule");

  const Matrix z_ref = sampler.sample_points(m, derive_seed(seed, 0xEF));
  const Vector fstar_ref = fstar.at_points(z_ref);

  Matrix mean_ref(R_X, m);          // per-design inner mean on the ref batch
  Vector within_ref(R_X);           // per-design inner variance on ref batch
  std::vector<double> cond_vars(static_cast<std::size_t>(R_X));
  std::vector<double> risks(static_cast<std::size_t>(R_X));
  std::vector<char> ok(std::size_t(R_X), 0);
  std::atomic<std::size_t> aborted{0};

  SolveOptions solve_opts;
  solve_opts.tol = opts.tol;
  solve_opts.certify_probes = 0;

  parallel_for(std::size_t(R_X), opts.workers, [&](std::size_t r) {
    const DesignSet design =
        sampler.sample_design(n, derive_seed(seed, 1, r));
    const ClassPtr cls = family(design);
    if (!cls->population_evaluable())
      throw EvaluationUnavailable(cls->kind_name());
    const Vector fstar_n = fstar.at_design(design);
    const Matrix z_own = sampler.sample_points(m, derive_seed(seed, 2, r));
    const Vector fstar_own = fstar.at_points(z_own);

    Vector sum_own = Vector::Zero(m), sumsq_own = Vector::Zero(m);
    Vector sum_ref = Vector::Zero(m), sumsq_ref = Vector::Zero(m);
    double risk_acc = 0.0;
    try {
      for (int s = 0; s < R_xi; ++s) {
        const Vector xi =
            generate_noise(model, n, derive_seed(seed, 3, r * 100000 + s));
        const ErmSolution sol = solve_erm(*cls, fstar_n, xi, solve_opts);
        const Vector v_own = cls->evaluate_batch(sol.fhat, z_own);
        const Vector v_ref = cls->evaluate_batch(sol.fhat, z_ref);
        sum_own += v_own;
        sumsq_own += v_own.cwiseProduct(v_own);
        sum_ref += v_ref;
        sumsq_ref += v_ref.cwiseProduct(v_ref);
        risk_acc += sq_norm_n(v_own - fstar_own);
      }
    } catch (const NonConvergence&) {
      aborted.fetch_add(1);
      return;
    }
    const double S = double(R_xi);
    risks[r] = risk_acc / S;
    // Per-point unbiased within-design variance, averaged over the batch.
    const Vector mean_own = sum_own / S;
    cond_vars[r] =
        (sumsq_own.sum() - S * mean_own.squaredNorm()) / (S - 1.0) / double(m);
    const Vector mr = sum_ref / S;
    within_ref[Eigen::Index(r)] =
        (sumsq_ref.sum() - S * mr.squaredNorm()) / (S - 1.0) / double(m);
    mean_ref.row(Eigen::Index(r)) = mr.transpose();
    ok[r] = 1;
  });

  const std::size_t failed = aborted.load();
  if (failed * 100 > std::size_t(R_X))
    throw SolverFailureThreshold(failed, std::size_t(R_X));

  std::vector<Eigen::Index> rows;
  for (std::size_t r = 0; r < std::size_t(R_X); ++r)
    if (ok[r]) rows.push_back(Eigen::Index(r));
  const double RX = double(rows.size());
  const double S = double(R_xi);

  // Aggregates over designs from the stored per-design summaries.
  const auto aggregate = [&](const std::vector<Eigen::Index>& sel) {
    Vector grand = Vector::Zero(m);
    for (Eigen::Index r : sel) grand += mean_ref.row(r).transpose();
    grand /= double(sel.size());
    double between = 0.0, within = 0.0;
    for (Eigen::Index r : sel) {
      between += sq_norm_n(mean_ref.row(r).transpose() - grand);
      within += within_ref[r];
    }
    between /= double(sel.size()) - 1.0;
    within /= double(sel.size());
    const double var_cond_mean = std::max(0.0, between - within / S);
    const double total =
        (within * double(sel.size()) * (S - 1.0) +
         S * between * (double(sel.size()) - 1.0)) /
        (double(sel.size()) * S - 1.0);
    const double bias_sq = std::max(
        0.0, sq_norm_n(grand - fstar_ref) - between / double(sel.size()));
    return std::array<double, 3>{var_cond_mean, total, bias_sq};
  };

  const auto point = aggregate(rows);

  // Bootstrap over outer replicates for the cross-design quantities.
  const int B = 200;
  std::vector<double> b_vcm, b_total, b_bias;
  b_vcm.reserve(B);
  b_total.reserve(B);
  b_bias.reserve(B);
  Rng boot_rng(derive_seed(seed, 0xB007));
  for (int b = 0; b < B; ++b) {
    std::vector<Eigen::Index> sel(rows.size());
    for (auto& idx : sel) idx = rows[boot_rng.index(rows.size())];
    const auto est = aggregate(sel);
    b_vcm.push_back(est[0]);
    b_total.push_back(est[1]);
    b_bias.push_back(est[2]);
  }

  std::vector<double> risk_sel, cond_sel;
  for (Eigen::Index r : rows) {
    risk_sel.push_back(risks[std::size_t(r)]);
    cond_sel.push_back(cond_vars[std::size_t(r)]);
  }

  DecompositionReport rep;
  rep.n = n;
  rep.replicates_outer = int(rows.size());
  rep.replicates_inner = R_xi;
  rep.norm_used = "population(" + std::to_string(m) + ")";
  rep.aborted = failed;
  rep.tol = opts.tol;
  rep.seed = seed;

  const auto risk_ms = mean_se(risk_sel);
  rep.risk = risk_ms.value;
  rep.se_risk = risk_ms.se;
  const auto cond_ms = mean_se(cond_sel);
  rep.cond_var = cond_ms.value;
  rep.se_cond_var = cond_ms.se;
  rep.var_cond_mean = point[0];
  rep.se_var_cond_mean = std::sqrt(sample_variance(b_vcm));
  rep.variance = point[1];
  rep.se_variance = std::sqrt(sample_variance(b_total));
  rep.bias_sq = point[2];
  rep.se_bias_sq = std::sqrt(sample_variance(b_bias));
  return rep;
}

std::vector<RateScanPoint> rate_scan(
    const std::function<ClassPtr(Eigen::Index)>& class_for_n,
    const std::function<Vector(Eigen::Index)>& fstar_for_n,
    const NoiseModel& model, const std::vector<Eigen::Index>& n_grid, int R,
    std::uint64_t seed, const DecompositionOptions& opts) {
  if (n_grid.size() < 4)
    throw ConfigInvalid("n_grid", "needs at least 4 sample sizes");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw ConfigInvalid("n_grid", "must be strictly increasing");

  std::vector<RateScanPoint> out;
  out.reserve(n_grid.size());
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const Eigen::Index n = n_grid[i];
    const ClassPtr cls = class_for_n(n);
    out.push_back({n, fixed_design_decomposition(
                          *cls, fstar_for_n(n), model, R,
                          derive_seed(seed, 4, i), opts)});
  }
  return out;
}

}  // namespace ermlab
