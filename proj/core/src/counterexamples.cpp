#include "ermlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "ermlab/classes.hpp"
#include "ermlab/errors.hpp"
#include "ermlab/rng.hpp"
#include "ermlab/stability.hpp"
#include "ermlab/stats.hpp"

namespace ermlab {

namespace {

bool is_prime(int q) {
  if (q < 2) return false;
  for (int d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

int mod_pow(int base, int exp, int q) {
  long long r = 1, b = base % q;
  while (exp > 0) {
    if (exp & 1) r = r * b % q;
    b = b * b % q;
    exp >>= 1;
  }
  return int(r);
}

int mod_inv(int a, int q) { return mod_pow(((a % q) + q) % q, q - 2, q); }

}  // namespace

FiniteFieldModel::FiniteFieldModel(int q, int n) : q_(q), n_(n) {
  if (!is_prime(q)) throw ConfigInvalid("q", "must be prime");
  if (q <= n) throw ConfigInvalid("q", "needs q > n");
  if (n < 1) throw ConfigInvalid("n", "needs n >= 1");
  const int dim = n + 1;
  double count = std::pow(double(q), dim);
  if (count > 4e6) throw FieldTooLarge("q^(n+1) exceeds the point budget");

  // All nonzero vectors of F_q^(n+1).
  std::vector<int> v(std::size_t(dim), 0);
  const std::size_t total = std::size_t(count);
  for (std::size_t id = 1; id < total; ++id) {
    std::size_t rem = id;
    for (int k = 0; k < dim; ++k) {
      v[std::size_t(k)] = int(rem % std::size_t(q));
      rem /= std::size_t(q);
    }
    points_.push_back(v);
  }

  // Canonical normals: first nonzero coordinate equal to 1.
  for (const auto& w : points_) {
    int lead = 0;
    while (lead < dim && w[std::size_t(lead)] == 0) ++lead;
    if (w[std::size_t(lead)] == 1) hyperplanes_.push_back(w);
  }

  membership_.assign(hyperplanes_.size(),
                     std::vector<char>(points_.size(), 0));
  h_points_.assign(hyperplanes_.size(), {});
  for (std::size_t h = 0; h < hyperplanes_.size(); ++h) {
    for (std::size_t p = 0; p < points_.size(); ++p) {
      long long dot = 0;
      for (int k = 0; k < dim; ++k)
        dot += (long long)(hyperplanes_[h][std::size_t(k)]) *
               points_[p][std::size_t(k)];
      if (dot % q == 0) {
        membership_[h][p] = 1;
        h_points_[h].push_back(p);
      }
    }
  }
}

std::optional<std::size_t> FiniteFieldModel::span_hyperplane(
    const std::vector<std::size_t>& tuple) const {
  const int dim = n_ + 1;
  // Row-reduce the tuple matrix mod q.
  std::vector<std::vector<int>> rows;
  rows.reserve(tuple.size());
  for (std::size_t t : tuple) rows.push_back(points_[t]);

  std::vector<int> pivot_cols;
  std::size_t r = 0;
  for (int c = 0; c < dim && r < rows.size(); ++c) {
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot][std::size_t(c)] % q_ == 0)
      ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    const int inv = mod_inv(rows[r][std::size_t(c)], q_);
    for (int k = 0; k < dim; ++k)
      rows[r][std::size_t(k)] = rows[r][std::size_t(k)] * inv % q_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const int factor = rows[i][std::size_t(c)] % q_;
      if (factor == 0) continue;
      for (int k = 0; k < dim; ++k)
        rows[i][std::size_t(k)] =
            ((rows[i][std::size_t(k)] - factor * rows[r][std::size_t(k)]) % q_ +
             q_) %
            q_;
    }
    pivot_cols.push_back(c);
    ++r;
  }
  if (r < std::size_t(n_)) return std::nullopt;  // deficient span

  // One null-space vector of the row space: the normal of the spanned
  // hyperplane. The single free column gets value 1.
  std::vector<int> w(std::size_t(dim), 0);
  int free_col = -1;
  for (int c = 0; c < dim; ++c)
    if (std::find(pivot_cols.begin(), pivot_cols.end(), c) == pivot_cols.end()) {
      free_col = c;
      break;
    }
  w[std::size_t(free_col)] = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    const int c = pivot_cols[i];
    w[std::size_t(c)] =
        ((-rows[i][std::size_t(free_col)]) % q_ + q_) % q_;
  }
  // Canonicalize: first nonzero coordinate scaled to 1.
  int lead = 0;
  while (lead < dim && w[std::size_t(lead)] == 0) ++lead;
  const int inv = mod_inv(w[std::size_t(lead)], q_);
  for (int k = 0; k < dim; ++k) w[std::size_t(k)] = w[std::size_t(k)] * inv % q_;
  for (std::size_t h = 0; h < hyperplanes_.size(); ++h)
    if (hyperplanes_[h] == w) return h;
  return std::nullopt;
}

EstimatorRule trust_span_rule() {
  return [](std::size_t span, int label) {
    return EstimatorChoice{label == 0, span};
  };
}

EstimatorRule distrust_span_rule(const FiniteFieldModel& model) {
  const std::size_t count = model.hyperplane_count();
  return [count](std::size_t span, int label) {
    return EstimatorChoice{label != 0, (span + 1) % count};
  };
}

namespace {

struct TupleScan {
  unsigned long long total = 0;                    // full-span tuples visited
  std::map<std::size_t, unsigned long long> span_counts;
};

/// Visits tuples from support^n: every tuple when their number fits the
/// budget, otherwise a seeded uniform sample. fn(tuple, span) is only called
/// on full-span tuples.
template <typename Fn>
bool visit_tuples(const FiniteFieldModel& model,
                  const std::vector<std::size_t>& support,
                  const FiniteFieldOptions& opts, std::uint64_t seed_stream,
                  Fn&& fn) {
  const int n = model.n();
  double total = 1.0;
  for (int i = 0; i < n; ++i) total *= double(support.size());
  if (total <= double(opts.tuple_budget)) {
    std::vector<std::size_t> tuple(static_cast<std::size_t>(n));
    const auto count = (unsigned long long)(total);
    for (unsigned long long t = 0; t < count; ++t) {
      unsigned long long rem = t;
      for (int i = 0; i < n; ++i) {
        tuple[std::size_t(i)] = support[std::size_t(rem % support.size())];
        rem /= support.size();
      }
      if (const auto span = model.span_hyperplane(tuple)) fn(tuple, *span);
    }
    return true;  // exact
  }
  if (!opts.allow_sampling)
    throw FieldTooLarge("tuple enumeration exceeds the budget");
  Rng rng(derive_seed(opts.seed, seed_stream));
  std::vector<std::size_t> tuple(static_cast<std::size_t>(n));
  for (std::size_t t = 0; t < opts.sample_tuples; ++t) {
    for (int i = 0; i < n; ++i)
      tuple[std::size_t(i)] = support[rng.index(support.size())];
    if (const auto span = model.span_hyperplane(tuple)) fn(tuple, *span);
  }
  return false;  // sampled
}

int evaluate_choice(const FiniteFieldModel& model, const EstimatorChoice& g,
                    std::size_t point) {
  const int ind = model.in_hyperplane(point, g.hyperplane) ? 1 : 0;
  return g.complement ? 1 - ind : ind;
}

int evaluate_fstar(const FiniteFieldModel& model, bool complement,
                   std::size_t h0, std::size_t point) {
  const int ind = model.in_hyperplane(point, h0) ? 1 : 0;
  return complement ? 1 - ind : ind;
}

}  // namespace

FiniteFieldReport finite_field_demo(int q, int n, const EstimatorRule& rule,
                                    const FiniteFieldOptions& opts) {
  const FiniteFieldModel model(q, n);
  FiniteFieldReport rep;
  rep.q = q;
  rep.n = n;
  rep.hyperplane_count = model.hyperplane_count();

  const std::size_t G = model.hyperplane_count();

  // Per-hyperplane probabilities; conditioned on the sample spanning H,
  // the rule's input is deterministic.
  rep.p_h0.resize(G);
  rep.p_h1.resize(G);
  for (std::size_t h = 0; h < G; ++h) {
    const EstimatorChoice c0 = rule(h, 0);
    const EstimatorChoice c1 = rule(h, 1);
    rep.p_h0[h] = (c0.complement && c0.hyperplane == h) ? 1.0 : 0.0;
    rep.p_h1[h] = (!c1.complement && c1.hyperplane == h) ? 1.0 : 0.0;
  }
  rep.p0_fubini = mean(rep.p_h0);
  rep.p1_fubini = mean(rep.p_h1);

  // Direct route under P: enumerate tuples, count the span occurrences.
  std::vector<std::size_t> all_points(model.point_count());
  for (std::size_t p = 0; p < all_points.size(); ++p) all_points[p] = p;
  unsigned long long full = 0, match0 = 0, match1 = 0;
  std::map<std::size_t, unsigned long long> span_hits;
  rep.exact_enumeration = visit_tuples(
      model, all_points, opts, 100,
      [&](const std::vector<std::size_t>&, std::size_t span) {
        ++full;
        ++span_hits[span];
        const EstimatorChoice c0 = rule(span, 0);
        const EstimatorChoice c1 = rule(span, 1);
        if (c0.complement && c0.hyperplane == span) ++match0;
        if (!c1.complement && c1.hyperplane == span) ++match1;
      });
  rep.p0 = double(match0) / double(full);
  rep.p1 = double(match1) / double(full);

  // Fubini consistency: exact integer identity under full enumeration (every
  // hyperplane hosts the same number of spanning tuples by symmetry).
  if (rep.exact_enumeration) {
    unsigned long long sum_h0 = 0, sum_h1 = 0;
    for (std::size_t h = 0; h < G; ++h) {
      sum_h0 += (unsigned long long)(rep.p_h0[h]);
      sum_h1 += (unsigned long long)(rep.p_h1[h]);
    }
    rep.fubini_exact = (match0 * G == sum_h0 * full) &&
                       (match1 * G == sum_h1 * full);
  } else {
    rep.fubini_exact = false;
  }

  rep.du_lower_bound = std::max(rep.p1, 1.0 - rep.p1);

  // Risk table for the canonical targets 1_{H0} and 1 - 1_{H0}.
  const std::size_t h0 = 0;
  const auto risk_rows = [&](bool fstar_complement, const std::string& fid) {
    // Error of a choice against fstar under a support: fraction of points
    // where the 0/1 functions disagree.
    const auto disagreement = [&](const EstimatorChoice& g,
                                  const std::vector<std::size_t>& support) {
      std::size_t miss = 0;
      for (std::size_t p : support)
        if (evaluate_fstar(model, fstar_complement, h0, p) !=
            evaluate_choice(model, g, p))
          ++miss;
      return double(miss) / double(support.size());
    };

    std::vector<std::pair<std::string, std::vector<std::size_t>>> dists;
    dists.emplace_back("P", all_points);
    for (std::size_t h = 0; h < G; ++h)
      dists.emplace_back("P^H" + std::to_string(h),
                         model.hyperplane_points(h));

    for (const auto& [did, support] : dists) {
      double risk_acc = 0.0, ambient_acc = 0.0;
      unsigned long long count = 0;
      visit_tuples(model, support, opts, 200 + (fstar_complement ? 1 : 0),
                   [&](const std::vector<std::size_t>& tuple, std::size_t span) {
                     const int label = evaluate_fstar(model, fstar_complement,
                                                      h0, tuple.front());
                     const EstimatorChoice g = rule(span, label);
                     risk_acc += disagreement(g, support);
                     ambient_acc += disagreement(g, all_points);
                     ++count;
                   });
      FiniteFieldRiskRow row;
      row.fstar_id = fid;
      row.distribution_id = did;
      row.risk = risk_acc / double(count);
      row.risk_ambient = ambient_acc / double(count);
      rep.risk_table.push_back(row);
    }
  };
  risk_rows(false, "1_H0");
  risk_rows(true, "1-1_H0");
  return rep;
}

std::vector<HalfspaceDemoRow> halfspace_stability_demo(
    Eigen::Index n, const std::vector<double>& delta_grid,
    const NoiseModel& model, int R, std::uint64_t seed, int directions,
    double tol) {
  if (model.kind != NoiseModel::Kind::GaussianIsotropic)
    throw ConfigInvalid("noise", "half-space demo needs Gaussian noise");
  const ClassPtr cls = make_halfspace(n);
  const Vector fstar = Vector::Zero(n);  // on the boundary

  SolveOptions opts;
  opts.tol = tol;
  opts.certify_probes = 0;

  std::vector<HalfspaceDemoRow> rows;
  for (double delta : delta_grid) {
    std::vector<double> diams;
    diams.reserve(std::size_t(R));
    for (int r = 0; r < R; ++r) {
      Vector xi = generate_noise(model, n, derive_seed(seed, 71, r));
      // Conditioning on an interior observation: y_1 > 0 by symmetry.
      xi[0] = std::abs(xi[0]);
      const ErmSolution sol = solve_erm(*cls, fstar, xi, opts);
      diams.push_back(o_delta_diameter(*cls, sol, delta, directions,
                                       derive_seed(seed, 72, r), tol)
                          .diameter);
    }
    HalfspaceDemoRow row;
    row.delta = delta;
    const auto ms = mean_se(diams);
    row.diameter = ms.value;
    row.diameter_se = ms.se;
    row.predicted = 2.0 * std::sqrt(delta);
    row.rel_deviation = row.predicted > 0.0
                            ? std::abs(row.diameter / row.predicted - 1.0)
                            : row.diameter;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ermlab
