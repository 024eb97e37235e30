#include "ermlab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "ermlab/errors.hpp"
#include "ermlab/parallel.hpp"
#include "ermlab/rng.hpp"
#include "ermlab/stats.hpp"

namespace ermlab {

EntropyCurve EntropyCurve::power_law(double a, double p) {
  EntropyCurve c;
  c.eval_ = [a, p](double eps) { return a * std::pow(eps, -p); };
  c.description_ = "power(a=" + std::to_string(a) + ",p=" + std::to_string(p) + ")";
  return c;
}

EntropyCurve EntropyCurve::logarithmic(double a) {
  EntropyCurve c;
  c.eval_ = [a](double eps) { return std::max(0.0, a * std::log(1.0 / eps)); };
  c.description_ = "log(a=" + std::to_string(a) + ")";
  return c;
}

EntropyCurve EntropyCurve::zero() {
  EntropyCurve c;
  c.eval_ = [](double) { return 0.0; };
  c.description_ = "zero";
  return c;
}

EntropyCurve EntropyCurve::empirical(
    std::vector<std::pair<double, double>> table) {
  if (table.empty())
    throw ConfigInvalid("entropy_table", "needs at least one sample");
  std::sort(table.begin(), table.end());
  // Running max toward eps -> 0: greedy counts fluctuate, the curve must
  // not increase in eps.
  for (std::size_t i = table.size() - 1; i-- > 0;)
    table[i].second = std::max(table[i].second, table[i + 1].second);
  EntropyCurve c;
  c.table_ = table;
  auto tab = table;
  c.eval_ = [tab](double eps) {
    if (eps <= tab.front().first) return tab.front().second;
    if (eps >= tab.back().first) return tab.back().second;
    auto it = std::lower_bound(
        tab.begin(), tab.end(), std::make_pair(eps, -1e300));
    const auto hi = *it;
    const auto lo = *(it - 1);
    const double t = (eps - lo.first) / (hi.first - lo.first);
    return lo.second * (1.0 - t) + hi.second * t;
  };
  c.description_ = "empirical(" + std::to_string(table.size()) + " scales)";
  return c;
}

std::vector<Vector> greedy_net_pool(const std::vector<Vector>& pool,
                                    double epsilon) {
  if (!(epsilon > 0.0)) throw ConfigInvalid("epsilon", "must be positive");
  std::vector<Vector> centers;
  if (pool.empty()) return centers;

  std::vector<double> dist(pool.size(), kInf);
  // First center: the first pool member; then farthest-point traversal.
  std::size_t next = 0;
  while (true) {
    centers.push_back(pool[next]);
    double far = 0.0;
    std::size_t far_idx = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      dist[i] = std::min(dist[i], norm_n(pool[i] - centers.back()));
      if (dist[i] > far) {
        far = dist[i];
        far_idx = i;
      }
    }
    if (far <= epsilon) break;
    next = far_idx;
  }
  return centers;
}

std::vector<Vector> greedy_net(const FunctionClass& cls, double epsilon,
                               std::size_t pool_size, std::uint64_t seed) {
  std::vector<Vector> pool;
  pool.reserve(pool_size);
  Rng rng(seed);
  for (std::size_t i = 0; i < pool_size; ++i)
    pool.push_back(cls.sample_member_with(rng));
  return greedy_net_pool(pool, epsilon);
}

EntropyCurve empirical_entropy_curve(const FunctionClass& cls,
                                     const std::vector<double>& eps_grid,
                                     std::size_t pool_size,
                                     std::uint64_t seed) {
  std::vector<Vector> pool;
  pool.reserve(pool_size);
  Rng rng(seed);
  for (std::size_t i = 0; i < pool_size; ++i)
    pool.push_back(cls.sample_member_with(rng));
  std::vector<std::pair<double, double>> table;
  table.reserve(eps_grid.size());
  for (double eps : eps_grid)
    table.emplace_back(eps,
                       std::log(double(greedy_net_pool(pool, eps).size())));
  return EntropyCurve::empirical(std::move(table));
}

namespace {

/// Bisection for the crossing of a nonincreasing g against an increasing
/// reference; g(eps) := curve-term - balance-term must change sign.
double bisect_crossing(const std::function<double(double)>& g, double lo,
                       double hi) {
  double glo = g(lo), ghi = g(hi);
  if (glo < 0.0 || ghi > 0.0)
    throw NoCrossing("no crossing of the balancing curve on [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double solve_balancing(const EntropyCurve& curve, double n, double c) {
  if (n < 1) throw ConfigInvalid("n", "needs n >= 1");
  if (!(c > 0.0)) throw ConfigInvalid("c", "balancing constant must be > 0");
  const double lo = 1e-9, hi = 10.0;
  auto g = [&](double eps) { return curve(eps) - c * n * eps * eps; };
  return bisect_crossing(g, lo, hi);
}

EpsilonUResult solve_epsilon_u(const EntropyCurve& curve, double n,
                               double i_upper, double eps_star, double i_lower,
                               double c) {
  if (i_upper < 0.0) throw ConfigInvalid("i_upper", "must be >= 0");
  EpsilonUResult out;
  if (i_upper == 0.0) {
    out.eps_tilde = 0.0;  // degenerate balancing
  } else {
    auto g = [&](double eps) {
      return i_upper * curve(eps) - c * n * std::pow(eps, 4);
    };
    out.eps_tilde = bisect_crossing(g, 1e-9, 10.0);
  }
  out.eps_u = std::max(eps_star, out.eps_tilde);
  out.eps_v = std::sqrt(std::max(out.eps_u * out.eps_u, i_lower));
  return out;
}

IsometryDetail isometry_remainders(const ClassFamily& family,
                                   const PopulationSampler& sampler,
                                   Eigen::Index n, std::size_t pair_count,
                                   std::size_t design_replicates,
                                   Eigen::Index batch_m, std::uint64_t seed,
                                   std::size_t pool_size, std::size_t workers) {
  if (pair_count < 1) throw ConfigInvalid("pair_count", "needs >= 1 pairs");
  if (design_replicates < std::size_t(n))
    throw ConfigInvalid("design_replicates",
                        "needs >= n so the 1 - 1/n quantile is meaningful");

  std::vector<double> il(design_replicates, 0.0), iu(design_replicates, 0.0);

  parallel_for(design_replicates, workers, [&](std::size_t d) {
    const DesignSet design = sampler.sample_design(n, derive_seed(seed, 10, d));
    const ClassPtr cls = family(design);
    if (!cls->population_evaluable())
      throw EvaluationUnavailable(cls->kind_name());
    Rng rng(derive_seed(seed, 11, d));
    const std::size_t pool_n = std::min(pool_size, pair_count + 1);
    // Pool values at the design and at one fresh batch per design.
    const Matrix z = sampler.sample_points(batch_m, derive_seed(seed, 12, d));
    Matrix at_design(pool_n, n), at_batch(pool_n, batch_m);
    for (std::size_t i = 0; i < pool_n; ++i) {
      const Vector member = cls->sample_member_with(rng);
      at_design.row(Eigen::Index(i)) = member.transpose();
      at_batch.row(Eigen::Index(i)) =
          cls->evaluate_batch(member, z).transpose();
    }
    // Pair distances through Gram matrices, so large pair counts stay cheap.
    const Matrix g_emp =
        at_design * at_design.transpose() / double(n);
    const Matrix g_pop =
        at_batch * at_batch.transpose() / double(batch_m);
    const auto pair_stats = [&](std::size_t a, std::size_t b, double& wl,
                                double& wu) {
      const Eigen::Index i = Eigen::Index(a), j = Eigen::Index(b);
      const double emp = g_emp(i, i) + g_emp(j, j) - 2.0 * g_emp(i, j);
      const double pop = g_pop(i, i) + g_pop(j, j) - 2.0 * g_pop(i, j);
      wl = std::max(wl, 0.5 * pop - emp);
      wu = std::max(wu, 0.5 * emp - pop);
    };
    double worst_l = 0.0, worst_u = 0.0;
    if (pair_count >= pool_n * (pool_n - 1) / 2) {
      // The sample would saturate the pool; enumerate all pairs.
      for (std::size_t a = 0; a < pool_n; ++a)
        for (std::size_t b = a + 1; b < pool_n; ++b)
          pair_stats(a, b, worst_l, worst_u);
    } else {
      for (std::size_t p = 0; p < pair_count; ++p) {
        const std::size_t a = rng.index(pool_n);
        std::size_t b = rng.index(pool_n);
        if (b == a) b = (b + 1) % pool_n;
        pair_stats(a, b, worst_l, worst_u);
      }
    }
    il[d] = worst_l;
    iu[d] = worst_u;
  });

  IsometryDetail out;
  out.per_design_lower = il;
  out.per_design_upper = iu;
  out.confidence = 1.0 - 1.0 / double(n);
  out.i_lower = quantile(il, out.confidence);
  out.i_upper = quantile(iu, out.confidence);
  return out;
}

double generalization_diameter(const FunctionClass& cls,
                               const PopulationSampler& sampler,
                               const Vector& fstar_values, Eigen::Index m,
                               std::uint64_t seed) {
  const auto env = cls.interpolator_envelope(fstar_values);
  if (!env) return kInf;
  const Matrix pts = sampler.sample_points(m, seed);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::RowVectorXd x = pts.row(i);
    const double d = env->second(x) - env->first(x);
    acc += d * d;
  }
  return std::sqrt(acc / double(m));
}

}  // namespace ermlab
