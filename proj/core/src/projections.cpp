#include "ermlab/projections.hpp"

#include <algorithm>
#include <cmath>

#include "ermlab/errors.hpp"

namespace ermlab {

Vector pava_weighted(const Vector& y, const Vector& w) {
  const Eigen::Index n = y.size();
  if (w.size() != n) throw DimensionMismatch(std::size_t(n), std::size_t(w.size()));
  Vector out(n);
  if (n == 0) return out;

  // Blocks kept as (weighted mean, total weight, length), merged while the
  // monotonicity constraint between adjacent blocks is violated.
  std::vector<double> mean_stack, weight_stack;
  std::vector<Eigen::Index> len_stack;
  mean_stack.reserve(std::size_t(n));
  weight_stack.reserve(std::size_t(n));
  len_stack.reserve(std::size_t(n));

  for (Eigen::Index i = 0; i < n; ++i) {
    double m = y[i], wt = w[i];
    Eigen::Index len = 1;
    while (!mean_stack.empty() && mean_stack.back() >= m) {
      m = (mean_stack.back() * weight_stack.back() + m * wt) /
          (weight_stack.back() + wt);
      wt += weight_stack.back();
      len += len_stack.back();
      mean_stack.pop_back();
      weight_stack.pop_back();
      len_stack.pop_back();
    }
    mean_stack.push_back(m);
    weight_stack.push_back(wt);
    len_stack.push_back(len);
  }

  Eigen::Index pos = 0;
  for (std::size_t b = 0; b < mean_stack.size(); ++b)
    for (Eigen::Index k = 0; k < len_stack[b]; ++k) out[pos++] = mean_stack[b];
  return out;
}

Vector pava(const Vector& y) { return pava_weighted(y, Vector::Ones(y.size())); }

Vector project_halfspace_leq(const Vector& v, const Vector& a, double b) {
  const double slack = a.dot(v) - b;
  if (slack <= 0.0) return v;
  return v - (slack / a.squaredNorm()) * a;
}

Vector project_pair_slab(const Vector& v, Eigen::Index i, Eigen::Index j,
                         double c) {
  const double d = v[i] - v[j];
  Vector out = v;
  if (d > c) {
    const double shift = (d - c) / 2.0;
    out[i] -= shift;
    out[j] += shift;
  } else if (d < -c) {
    const double shift = (-d - c) / 2.0;
    out[i] += shift;
    out[j] -= shift;
  }
  return out;
}

Vector project_ball(const Vector& v, const Vector& center, double radius) {
  Vector d = v - center;
  const double nrm = d.norm();
  if (nrm <= radius) return v;
  if (nrm == 0.0) return center;
  return center + (radius / nrm) * d;
}

Vector project_box(const Vector& v, double lo, double hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

Vector dykstra(const Vector& target, const std::vector<ConvexPiece>& pieces,
               const DykstraOptions& opts) {
  if (pieces.empty()) return target;
  if (pieces.size() == 1) return pieces[0].project(target);

  const std::size_t k = pieces.size();
  Vector x = target;
  std::vector<Vector> increments(k, Vector::Zero(target.size()));

  // Stop well under the caller tolerance: the sweep displacement is a proxy
  // for the distance to the true projection, not a bound on it.
  const double stop = std::max(opts.tol * 1e-2, 1e-14);

  for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      const Vector y = x + increments[s];
      Vector px = pieces[s].project(y);
      increments[s] = y - px;
      moved = std::max(moved, (px - x).norm());
      x = std::move(px);
    }
    if (moved <= stop) {
      double worst = 0.0;
      for (const auto& p : pieces) worst = std::max(worst, p.violation(x));
      if (worst <= stop) return x;
    }
  }

  double worst = 0.0;
  for (const auto& p : pieces) worst = std::max(worst, p.violation(x));
  throw NonConvergence(opts.max_sweeps, worst);
}

}  // namespace ermlab
