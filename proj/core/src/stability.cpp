#include "ermlab/stability.hpp"

#include <algorithm>
#include <cmath>

#include "ermlab/errors.hpp"
#include "ermlab/parallel.hpp"
#include "ermlab/rng.hpp"
#include "ermlab/stats.hpp"

namespace ermlab {

void StabilityConfig::validate() const {
  if (!(M > 0.0) || !(M_prime > 0.0) || !(c_I > 0.0) || !(c_2 > 0.0) ||
      probe_directions < 1)
    throw ConfigInvalid("stability", "all constants must be positive");
}

namespace {

/// Probe points of O_delta: projections of far points along random unit
/// directions onto class ∩ loss-ball; every returned point is a certified
/// member of O_delta. The solution itself is always included.
std::vector<Vector> probe_o_delta(const FunctionClass& cls,
                                  const ErmSolution& solution, double delta,
                                  int directions, std::uint64_t seed,
                                  double tol) {
  if (delta < 0.0) throw ConfigInvalid("delta", "must be >= 0");
  const Eigen::Index n = cls.n();
  const double radius_sq = (solution.loss + delta) * double(n);
  const double radius = std::sqrt(std::max(0.0, radius_sq));
  const Vector& y = solution.y;

  const auto ball_piece = ConvexPiece{
      [y, radius](const Vector& v) { return project_ball(v, y, radius); },
      [y, radius](const Vector& v) {
        return std::max(0.0, (v - y).norm() - radius);
      }};
  const auto class_piece = ConvexPiece{
      [&cls, tol](const Vector& v) { return cls.project(v, tol); },
      [&cls](const Vector& v) { return cls.violation(v); }};

  const double far = 4.0 * (radius + 1.0);
  std::vector<Vector> probes;
  probes.reserve(std::size_t(directions) * 2 + 1);
  probes.push_back(solution.fhat);
  Rng rng(seed);
  DykstraOptions opts;
  opts.tol = tol;
  for (int k = 0; k < directions; ++k) {
    const Vector u = rng.unit_direction(n);
    for (const double sign : {1.0, -1.0}) {
      const Vector target = y + sign * far * u;
      probes.push_back(dykstra(target, {class_piece, ball_piece}, opts));
    }
  }
  return probes;
}

double max_pairwise_norm_n(const std::vector<Vector>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, norm_n(pts[i] - pts[j]));
  return best;
}

double clamp_probability(double p, int replicates) {
  return std::clamp(p, 1.0 / double(replicates), 1.0);
}

}  // namespace

ODeltaProbe o_delta_diameter(const FunctionClass& cls,
                             const ErmSolution& solution, double delta,
                             int directions, std::uint64_t seed, double tol) {
  ODeltaProbe out;
  out.probes = probe_o_delta(cls, solution, delta, directions, seed, tol);
  out.diameter = max_pairwise_norm_n(out.probes);
  return out;
}

ODeltaProbe o_delta_diameter_population(const FunctionClass& cls,
                                        const ErmSolution& solution,
                                        double delta, int directions,
                                        std::uint64_t seed,
                                        const PopulationSampler& sampler,
                                        Eigen::Index m, double tol) {
  ODeltaProbe out;
  out.probes = probe_o_delta(cls, solution, delta, directions, seed, tol);
  const Matrix z = sampler.sample_points(m, derive_seed(seed, 21));
  Matrix vals(Eigen::Index(out.probes.size()), m);
  for (std::size_t i = 0; i < out.probes.size(); ++i)
    vals.row(Eigen::Index(i)) = cls.evaluate_batch(out.probes[i], z).transpose();
  double best = 0.0;
  for (Eigen::Index i = 0; i < vals.rows(); ++i)
    for (Eigen::Index j = i + 1; j < vals.rows(); ++j)
      best = std::max(
          best, std::sqrt((vals.row(i) - vals.row(j)).squaredNorm() /
                          double(m)));
  out.diameter = best;
  return out;
}

double estimate_rho_s(const FunctionClass& cls, const Vector& fstar,
                      const NoiseModel& model, const StabilityConfig& config,
                      double eps_star, int R_outer, int R_inner,
                      std::uint64_t seed, const PopulationSampler* sampler,
                      Eigen::Index m, double tol) {
  config.validate();
  if (R_outer < 1 || R_inner < 1)
    throw ConfigInvalid("replicates", "need at least one draw");
  const Eigen::Index n = cls.n();
  const double ball_radius = config.M * eps_star * std::sqrt(double(n));

  const bool population = sampler != nullptr && cls.population_evaluable();
  std::optional<Matrix> z;
  if (population) z = sampler->sample_points(m, derive_seed(seed, 31));

  SolveOptions opts;
  opts.tol = tol;
  opts.certify_probes = 0;

  std::vector<double> worst(std::size_t(R_outer), 0.0);
  for (int r = 0; r < R_outer; ++r) {
    const Vector xi = generate_noise(model, n, derive_seed(seed, 32, r));
    const Vector base = solve_erm(cls, fstar, xi, opts).fhat;
    std::optional<Vector> base_vals;
    if (population) base_vals = cls.evaluate_batch(base, *z);
    Rng rng(derive_seed(seed, 33, r));
    double d = 0.0;
    for (int k = 0; k < R_inner; ++k) {
      // Uniform draw in the Euclidean ball of radius M eps_star sqrt(n).
      const Vector dir = rng.unit_direction(n);
      const double rad =
          ball_radius * std::pow(rng.uniform01(), 1.0 / double(n));
      const Vector moved =
          solve_erm(cls, fstar, xi + rad * dir, opts).fhat;
      if (population) {
        const Vector mv = cls.evaluate_batch(moved, *z);
        d = std::max(d, (mv - *base_vals).squaredNorm() / double(m));
      } else {
        d = std::max(d, sq_norm_n(moved - base));
      }
    }
    worst[std::size_t(r)] = d;
  }

  const double level = clamp_probability(
      std::exp(-config.c_2 * double(n) * eps_star * eps_star), R_outer);
  return quantile(worst, level);
}

double estimate_rho_o(const ClassFamily& family, Eigen::Index n,
                      const PopulationSampler& sampler, const FstarRule& fstar,
                      const NoiseModel& model, const StabilityConfig& config,
                      double eps_star, int R, Eigen::Index m,
                      std::uint64_t seed, double tol) {
  config.validate();
  if (R < 100) throw ConfigInvalid("R", "rho_O needs at least 100 replicates");
  const double delta = config.M_prime * eps_star * eps_star;

  SolveOptions opts;
  opts.tol = tol;
  opts.certify_probes = 0;

  std::vector<double> diams(std::size_t(R), 0.0);
  for (int r = 0; r < R; ++r) {
    const DesignSet design = sampler.sample_design(n, derive_seed(seed, 41, r));
    const ClassPtr cls = family(design);
    if (!cls->population_evaluable())
      throw EvaluationUnavailable(cls->kind_name());
    const Vector xi = generate_noise(model, n, derive_seed(seed, 42, r));
    const ErmSolution sol = solve_erm(*cls, fstar.at_design(design), xi, opts);
    diams[std::size_t(r)] =
        o_delta_diameter_population(*cls, sol, delta, config.probe_directions,
                                    derive_seed(seed, 43, r), sampler, m, tol)
            .diameter;
  }

  const double level = clamp_probability(
      2.0 * std::exp(-config.c_I * double(n) * eps_star * eps_star), R);
  const double q = quantile(diams, level);
  return q * q;
}

JaggedSummary jagged_probe(const FunctionClass& cls, const Vector& fstar,
                           const NoiseModel& model, int R, std::uint64_t seed,
                           double eps_star, double C, double tol,
                           std::size_t workers) {
  if (!model.symmetric()) throw AsymmetricNoise(model.kind_name());
  if (R < 1) throw ConfigInvalid("R", "needs at least one replicate");
  const Eigen::Index n = cls.n();

  JaggedSummary s;
  s.distance.resize(std::size_t(R));
  s.excess.resize(std::size_t(R));
  s.norm_plus.resize(std::size_t(R));
  s.norm_minus.resize(std::size_t(R));

  SolveOptions opts;
  opts.tol = tol;
  opts.certify_probes = 0;

  parallel_for(std::size_t(R), workers, [&](std::size_t r) {
    const Vector xi = generate_noise(model, n, derive_seed(seed, 51, r));
    const ErmSolution plus = solve_erm(cls, fstar, xi, opts);
    const ErmSolution minus = solve_erm(cls, fstar, -xi, opts);
    s.distance[r] = norm_n(plus.fhat - minus.fhat);
    s.excess[r] =
        empirical_loss(plus.y, minus.fhat) - empirical_loss(plus.y, plus.fhat);
    s.norm_plus[r] = norm_n(plus.fhat - fstar);
    s.norm_minus[r] = norm_n(minus.fhat - fstar);
  });

  s.distance_median = quantile(s.distance, 0.5);
  s.distance_q90 = quantile(s.distance, 0.9);
  s.excess_median = quantile(s.excess, 0.5);
  s.excess_q90 = quantile(s.excess, 0.9);
  if (eps_star > 0.0) {
    std::size_t count = 0;
    for (double e : s.excess)
      if (e >= C * eps_star * eps_star) ++count;
    s.exceed_fraction = double(count) / double(R);
  }
  s.ks_symmetry = ks_statistic(s.norm_plus, s.norm_minus);
  return s;
}

FixedPointResult fixed_point_search(const FunctionClass& cls,
                                    const NoiseModel& model, int R_inner,
                                    int max_iter, double tol_fp,
                                    std::uint64_t seed,
                                    std::optional<Vector> start, int R_report,
                                    double tol, std::size_t workers) {
  if (R_inner < 500)
    throw ConfigInvalid("R_inner", "fixed-point iteration needs >= 500");
  if (!cls.bounded()) throw UnboundedClass(cls.kind_name());
  const Eigen::Index n = cls.n();

  SolveOptions opts;
  opts.tol = tol;
  opts.certify_probes = 0;

  Vector f = start ? *start : cls.project(Vector::Zero(n), tol);
  double residual = kInf;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Matrix fhats(R_inner, n);
    parallel_for(std::size_t(R_inner), workers, [&](std::size_t s) {
      const Vector xi =
          generate_noise(model, n, derive_seed(seed, 61, iter * 1000003 + s));
      fhats.row(Eigen::Index(s)) = solve_erm(cls, f, xi, opts).fhat.transpose();
    });
    const Vector next =
        cls.project(fhats.colwise().mean().transpose(), tol);
    residual = norm_n(next - f);
    f = next;
    if (residual <= tol_fp) {
      ++iter;
      break;
    }
  }
  if (residual > tol_fp) throw NonConvergence(std::size_t(max_iter), residual);

  FixedPointResult out;
  out.fstar = f;
  out.residual = residual;
  out.iterations = iter;
  DecompositionOptions dopts;
  dopts.tol = tol;
  dopts.workers = workers;
  out.report = fixed_design_decomposition(cls, f, model, R_report,
                                          derive_seed(seed, 62), dopts);
  const double se = std::hypot(out.report.se_bias_sq,
                               0.1 * out.report.se_variance);
  out.success = out.report.bias_sq <= 0.1 * out.report.variance + 3.0 * se;
  return out;
}

}  // namespace ermlab
