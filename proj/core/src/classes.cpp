#include "ermlab/classes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "ermlab/errors.hpp"
#include "ermlab/stats.hpp"

namespace ermlab {

Vector FunctionClass::project(const Vector& target, double tol) const {
  if (target.size() != n_)
    throw DimensionMismatch(std::size_t(n_), std::size_t(target.size()));
  if (!(tol > 0.0)) throw ConfigInvalid("tol", "must be positive");
  return project_impl(target, tol);
}

Vector FunctionClass::sample_member(std::uint64_t seed) const {
  Rng rng(seed);
  return sample_impl(rng);
}

Vector FunctionClass::evaluate_batch(const Vector&, const Matrix&) const {
  throw EvaluationUnavailable(kind_name_);
}

std::optional<std::pair<PointFn, PointFn>> FunctionClass::interpolator_envelope(
    const Vector&) const {
  throw InterpolatorSamplingUnavailable(kind_name_);
}

namespace {

double box_excess(const Vector& v, double lo, double hi) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    worst = std::max({worst, lo - v[i], v[i] - hi});
  return worst;
}

// ---------------------------------------------------------------------------
// AffineSubspace: all of R^n
// ---------------------------------------------------------------------------

class WholeSpaceClass final : public FunctionClass {
public:
  explicit WholeSpaceClass(Eigen::Index n)
      : FunctionClass(n, "AffineSubspace(whole)") {}

  double violation(const Vector&) const override { return 0.0; }
  double empirical_diameter() const override { return kInf; }

protected:
  Vector project_impl(const Vector& t, double) const override { return t; }
  Vector sample_impl(Rng&) const override {
    throw UnboundedClass(kind_name());
  }
};

// ---------------------------------------------------------------------------
// Constants: {c * 1 : c in [lo, hi]}
// ---------------------------------------------------------------------------

class ConstantsClass final : public FunctionClass {
public:
  ConstantsClass(Eigen::Index n, double lo, double hi)
      : FunctionClass(n, "Constants"), lo_(lo), hi_(hi) {}

  double violation(const Vector& v) const override {
    const double spread = v.maxCoeff() - v.minCoeff();
    const double c = v.mean();
    return std::max({spread, lo_ - c, c - hi_, 0.0});
  }

  double empirical_diameter() const override { return hi_ - lo_; }
  bool population_evaluable() const override { return true; }

  Vector evaluate_batch(const Vector& values, const Matrix& pts) const override {
    return Vector::Constant(pts.rows(), values.mean());
  }

  std::optional<std::pair<PointFn, PointFn>> interpolator_envelope(
      const Vector& values) const override {
    const double c = values.mean();
    PointFn f = [c](const Eigen::RowVectorXd&) { return c; };
    return std::make_pair(f, f);
  }

protected:
  Vector project_impl(const Vector& t, double) const override {
    const double c = std::clamp(t.mean(), lo_, hi_);
    return Vector::Constant(n_, c);
  }
  Vector sample_impl(Rng& rng) const override {
    if (!std::isfinite(lo_) || !std::isfinite(hi_))
      throw UnboundedClass(kind_name());
    return Vector::Constant(n_, rng.uniform(lo_, hi_));
  }

private:
  double lo_, hi_;
};

// ---------------------------------------------------------------------------
// Polynomial subspace: span{1, x, ..., x^(p-1)} on the first covariate
// ---------------------------------------------------------------------------

class PolynomialClass final : public FunctionClass {
public:
  PolynomialClass(const DesignSet& design, int degree, double coeff_bound)
      : FunctionClass(design.n(), "AffineSubspace(poly)"),
        design_(design),
        degree_(degree),
        coeff_bound_(coeff_bound) {
    if (degree < 1) throw ConfigInvalid("degree", "must be >= 1");
    basis_.resize(design.n(), degree);
    for (Eigen::Index i = 0; i < design.n(); ++i) {
      double p = 1.0;
      for (int k = 0; k < degree; ++k) {
        basis_(i, k) = p;
        p *= design.points(i, 0);
      }
    }
    qr_.compute(basis_);
    rank_ = qr_.rank();
    // Orthonormal basis of the column space.
    q_ = qr_.householderQ() * Matrix::Identity(design.n(), rank_);
  }

  double violation(const Vector& v) const override {
    return (v - q_ * (q_.transpose() * v)).norm();
  }

  double empirical_diameter() const override { return kInf; }
  bool population_evaluable() const override { return true; }

  Vector evaluate_batch(const Vector& values, const Matrix& pts) const override {
    const Vector coeffs = qr_.solve(values);
    Vector out(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      double acc = 0.0, p = 1.0;
      for (int k = 0; k < degree_; ++k) {
        acc += coeffs[k] * p;
        p *= pts(i, 0);
      }
      out[i] = acc;
    }
    return out;
  }

  std::optional<std::pair<PointFn, PointFn>> interpolator_envelope(
      const Vector& values) const override {
    if (rank_ < degree_) return std::nullopt;  // underdetermined coefficients
    const Vector coeffs = qr_.solve(values);
    const int degree = degree_;
    PointFn f = [coeffs, degree](const Eigen::RowVectorXd& x) {
      double acc = 0.0, p = 1.0;
      for (int k = 0; k < degree; ++k) {
        acc += coeffs[k] * p;
        p *= x[0];
      }
      return acc;
    };
    return std::make_pair(f, f);
  }

protected:
  Vector project_impl(const Vector& t, double) const override {
    return q_ * (q_.transpose() * t);
  }
  Vector sample_impl(Rng& rng) const override {
    Vector coeffs(degree_);
    for (int k = 0; k < degree_; ++k)
      coeffs[k] = rng.uniform(-coeff_bound_, coeff_bound_);
    return basis_ * coeffs;
  }

private:
  DesignSet design_;
  int degree_;
  double coeff_bound_;
  Matrix basis_;
  Matrix q_;
  Eigen::ColPivHouseholderQR<Matrix> qr_;
  Eigen::Index rank_;
};

// ---------------------------------------------------------------------------
// Ball (Euclidean)
// ---------------------------------------------------------------------------

class BallClass final : public FunctionClass {
public:
  BallClass(Vector center, double radius)
      : FunctionClass(center.size(), "Ball"),
        center_(std::move(center)),
        radius_(radius) {
    if (radius < 0.0) throw ConfigInvalid("radius", "must be >= 0");
  }

  double violation(const Vector& v) const override {
    return std::max(0.0, (v - center_).norm() - radius_);
  }

  double empirical_diameter() const override {
    return 2.0 * radius_ / std::sqrt(double(n_));
  }

protected:
  Vector project_impl(const Vector& t, double) const override {
    return project_ball(t, center_, radius_);
  }
  Vector sample_impl(Rng& rng) const override {
    const Vector u = rng.unit_direction(n_);
    const double r =
        radius_ * std::pow(rng.uniform01(), 1.0 / double(n_));
    return center_ + r * u;
  }

private:
  Vector center_;
  double radius_;
};

// ---------------------------------------------------------------------------
// Box [lo, hi]^n
// ---------------------------------------------------------------------------

class BoxClass final : public FunctionClass {
public:
  BoxClass(Eigen::Index n, double lo, double hi)
      : FunctionClass(n, "Box"), lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw ConfigInvalid("box", "lo must be <= hi");
  }

  double violation(const Vector& v) const override {
    return box_excess(v, lo_, hi_);
  }
  double empirical_diameter() const override { return hi_ - lo_; }

protected:
  Vector project_impl(const Vector& t, double) const override {
    return project_box(t, lo_, hi_);
  }
  Vector sample_impl(Rng& rng) const override {
    if (!std::isfinite(lo_) || !std::isfinite(hi_))
      throw UnboundedClass(kind_name());
    Vector v(n_);
    for (Eigen::Index i = 0; i < n_; ++i) v[i] = rng.uniform(lo_, hi_);
    return v;
  }

private:
  double lo_, hi_;
};

// ---------------------------------------------------------------------------
// HalfSpace {v : v_k >= 0}; deliberately diameter-unbounded
// ---------------------------------------------------------------------------

class HalfSpaceClass final : public FunctionClass {
public:
  HalfSpaceClass(Eigen::Index n, Eigen::Index coord)
      : FunctionClass(n, "HalfSpace"), coord_(coord) {
    if (coord < 0 || coord >= n)
      throw ConfigInvalid("halfspace_coord", "out of range");
  }

  double violation(const Vector& v) const override {
    return std::max(0.0, -v[coord_]);
  }
  double empirical_diameter() const override { return kInf; }

protected:
  Vector project_impl(const Vector& t, double) const override {
    Vector out = t;
    if (out[coord_] < 0.0) out[coord_] = 0.0;
    return out;
  }
  Vector sample_impl(Rng&) const override {
    throw UnboundedClass(kind_name());
  }

private:
  Eigen::Index coord_;
};

// ---------------------------------------------------------------------------
// Isotonic cone, chain order (by index, or by sorted x of a 1-d design),
// optionally intersected with a box. Ties in the design force equality.
// ---------------------------------------------------------------------------

class IsotonicClass final : public FunctionClass {
public:
  IsotonicClass(Eigen::Index n, std::optional<DesignSet> design, double lo,
                double hi)
      : FunctionClass(n, "IsotonicCone"),
        design_(std::move(design)),
        lo_(lo),
        hi_(hi) {
    if (!(lo <= hi)) throw ConfigInvalid("bounds", "lo must be <= hi");
    order_.resize(std::size_t(n));
    std::iota(order_.begin(), order_.end(), Eigen::Index(0));
    if (design_) {
      if (design_->d() != 1)
        throw ConfigInvalid("design", "IsotonicCone needs a 1-d design");
      const auto& x = design_->points;
      std::stable_sort(order_.begin(), order_.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return x(a, 0) < x(b, 0);
                       });
    }
    // Tie groups of equal covariates (only possible with a design).
    group_of_.resize(std::size_t(n));
    std::size_t g = 0;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      if (k > 0) {
        const bool tie =
            design_ && design_->points(order_[k], 0) ==
                           design_->points(order_[k - 1], 0);
        if (!tie) ++g;
      }
      group_of_[std::size_t(order_[k])] = g;
      if (g + 1 > group_count_) group_count_ = g + 1;
    }
    sorted_x_.resize(group_count_);
    if (design_) {
      for (std::size_t k = 0; k < order_.size(); ++k)
        sorted_x_[group_of_[std::size_t(order_[k])]] =
            design_->points(order_[k], 0);
    }
  }

  double violation(const Vector& v) const override {
    double worst = box_excess(v, lo_, hi_);
    for (std::size_t k = 1; k < order_.size(); ++k) {
      const double prev = v[order_[k - 1]];
      const double cur = v[order_[k]];
      if (group_of_[std::size_t(order_[k])] ==
          group_of_[std::size_t(order_[k - 1])])
        worst = std::max(worst, std::abs(cur - prev));
      else
        worst = std::max(worst, prev - cur);
    }
    return worst;
  }

  double empirical_diameter() const override { return hi_ - lo_; }
  bool population_evaluable() const override { return design_.has_value(); }

  Vector evaluate_batch(const Vector& values, const Matrix& pts) const override {
    if (!design_) throw EvaluationUnavailable(kind_name());
    const Vector gv = group_values(values);
    Vector out(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      out[i] = gv[step_index(pts(i, 0))];
    return out;
  }

  std::optional<std::pair<PointFn, PointFn>> interpolator_envelope(
      const Vector& values) const override {
    if (!design_) throw InterpolatorSamplingUnavailable(kind_name());
    if (!std::isfinite(lo_) || !std::isfinite(hi_)) return std::nullopt;
    auto xs = sorted_x_;
    const Vector gv = group_values(values);
    const double lo = lo_, hi = hi_;
    PointFn fmin = [xs, gv, lo](const Eigen::RowVectorXd& p) {
      const double x = p[0];
      if (x < xs.front()) return lo;
      std::size_t i = std::size_t(
          std::upper_bound(xs.begin(), xs.end(), x) - xs.begin() - 1);
      return gv[Eigen::Index(i)];
    };
    PointFn fmax = [xs, gv, hi](const Eigen::RowVectorXd& p) {
      const double x = p[0];
      if (x > xs.back()) return hi;
      std::size_t i = std::size_t(
          std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
      return gv[Eigen::Index(i)];
    };
    return std::make_pair(fmin, fmax);
  }

protected:
  Vector project_impl(const Vector& t, double) const override {
    // Weighted PAVA over tie groups, then clamping; both steps are exact for
    // the chain order intersected with a box.
    Vector gy = Vector::Zero(Eigen::Index(group_count_));
    Vector gw = Vector::Zero(Eigen::Index(group_count_));
    for (Eigen::Index i = 0; i < n_; ++i) {
      gy[Eigen::Index(group_of_[std::size_t(i)])] += t[i];
      gw[Eigen::Index(group_of_[std::size_t(i)])] += 1.0;
    }
    gy.array() /= gw.array();
    Vector fitted = pava_weighted(gy, gw);
    Vector out(n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      out[i] = std::clamp(fitted[Eigen::Index(group_of_[std::size_t(i)])],
                          lo_, hi_);
    return out;
  }

  Vector sample_impl(Rng& rng) const override {
    if (!std::isfinite(lo_) || !std::isfinite(hi_))
      throw UnboundedClass(kind_name());
    // Sorted uniforms are exactly uniform on the monotone body.
    std::vector<double> draws(group_count_);
    for (auto& d : draws) d = rng.uniform(lo_, hi_);
    std::sort(draws.begin(), draws.end());
    Vector v(n_);
    for (Eigen::Index i = 0; i < n_; ++i)
      v[i] = draws[group_of_[std::size_t(i)]];
    return v;
  }

private:
  Vector group_values(const Vector& values) const {
    Vector gv = Vector::Zero(Eigen::Index(group_count_));
    Vector gw = Vector::Zero(Eigen::Index(group_count_));
    for (Eigen::Index i = 0; i < n_; ++i) {
      gv[Eigen::Index(group_of_[std::size_t(i)])] += values[i];
      gw[Eigen::Index(group_of_[std::size_t(i)])] += 1.0;
    }
    return gv.array() / gw.array();
  }

  Eigen::Index step_index(double x) const {
    // Rightmost design point <= x; first group below the design.
    auto it = std::upper_bound(sorted_x_.begin(), sorted_x_.end(), x);
    if (it == sorted_x_.begin()) return 0;
    return Eigen::Index(it - sorted_x_.begin() - 1);
  }

  std::optional<DesignSet> design_;
  double lo_, hi_;
  std::vector<Eigen::Index> order_;
  std::vector<std::size_t> group_of_;
  std::size_t group_count_ = 1;
  std::vector<double> sorted_x_;
};

// ---------------------------------------------------------------------------
// Isotonic cone under a general partial order (Dykstra over edge half-spaces)
// ---------------------------------------------------------------------------

class IsotonicOrderClass final : public FunctionClass {
public:
  IsotonicOrderClass(Eigen::Index n,
                     std::vector<std::pair<Eigen::Index, Eigen::Index>> edges,
                     double lo, double hi)
      : FunctionClass(n, "IsotonicCone(order)"),
        edges_(std::move(edges)),
        lo_(lo),
        hi_(hi) {
    for (const auto& [i, j] : edges_)
      if (i < 0 || j < 0 || i >= n || j >= n)
        throw ConfigInvalid("order_edges", "vertex out of range");
  }

  double violation(const Vector& v) const override {
    double worst = box_excess(v, lo_, hi_);
    for (const auto& [i, j] : edges_)
      worst = std::max(worst, v[i] - v[j]);
    return std::max(worst, 0.0);
  }

  double empirical_diameter() const override { return hi_ - lo_; }

protected:
  Vector project_impl(const Vector& t, double tol) const override {
    std::vector<ConvexPiece> pieces;
    pieces.reserve(edges_.size() + 1);
    for (const auto& e : edges_) {
      const Eigen::Index i = e.first, j = e.second;
      pieces.push_back(
          {[i, j](const Vector& v) {
             Vector out = v;
             if (out[i] > out[j]) {
               const double m = (out[i] + out[j]) / 2.0;
               out[i] = out[j] = m;
             }
             return out;
           },
           [i, j](const Vector& v) { return std::max(0.0, v[i] - v[j]); }});
    }
    if (std::isfinite(lo_) || std::isfinite(hi_)) {
      const double lo = lo_, hi = hi_;
      pieces.push_back({[lo, hi](const Vector& v) {
                          return project_box(v, lo, hi);
                        },
                        [lo, hi](const Vector& v) {
                          return box_excess(v, lo, hi);
                        }});
    }
    DykstraOptions opts;
    opts.tol = tol;
    return dykstra(t, pieces, opts);
  }

  Vector sample_impl(Rng& rng) const override {
    if (!std::isfinite(lo_) || !std::isfinite(hi_))
      throw UnboundedClass(kind_name());
    // Rejection from the box; falls back to projecting a draw when the
    // order is too restrictive for rejection to land in sensible time.
    for (int attempt = 0; attempt < 2000; ++attempt) {
      Vector v(n_);
      for (Eigen::Index i = 0; i < n_; ++i) v[i] = rng.uniform(lo_, hi_);
      if (violation(v) <= 0.0) return v;
    }
    Vector v(n_);
    for (Eigen::Index i = 0; i < n_; ++i) v[i] = rng.uniform(lo_, hi_);
    return project_impl(v, kDefaultTol);
  }

private:
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges_;
  double lo_, hi_;
};

// ---------------------------------------------------------------------------
// Convex regression on a 1-d design: nonnegative second differences on the
// sorted design, ties merged with averaged targets, optional box.
// ---------------------------------------------------------------------------

class ConvexRegressionClass final : public FunctionClass {
public:
  ConvexRegressionClass(const DesignSet& design, double lo, double hi)
      : FunctionClass(design.n(), "ConvexRegression1D"), lo_(lo), hi_(hi) {
    if (design.d() != 1)
      throw ConfigInvalid("design", "ConvexRegression1D needs a 1-d design");
    if (!(lo <= hi)) throw ConfigInvalid("bounds", "lo must be <= hi");
    std::vector<Eigen::Index> order(std::size_t(design.n()));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    const auto& x = design.points;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return x(a, 0) < x(b, 0);
                     });
    group_of_.resize(std::size_t(design.n()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && x(order[k], 0) != x(order[k - 1], 0)) xs_.push_back(0.0);
      if (xs_.empty()) xs_.push_back(0.0);
      group_of_[std::size_t(order[k])] = xs_.size() - 1;
      xs_.back() = x(order[k], 0);
    }
    weights_ = Vector::Zero(Eigen::Index(xs_.size()));
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      weights_[Eigen::Index(group_of_[i])] += 1.0;
  }

  double violation(const Vector& v) const override {
    double worst = box_excess(v, lo_, hi_);
    const Vector gv = group_values(v);
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      worst = std::max(worst,
                       std::abs(v[Eigen::Index(i)] -
                                gv[Eigen::Index(group_of_[i])]));
    for (std::size_t k = 0; k + 2 < xs_.size(); ++k) {
      const double s1 = (gv[Eigen::Index(k + 1)] - gv[Eigen::Index(k)]) /
                        (xs_[k + 1] - xs_[k]);
      const double s2 = (gv[Eigen::Index(k + 2)] - gv[Eigen::Index(k + 1)]) /
                        (xs_[k + 2] - xs_[k + 1]);
      worst = std::max(worst, s1 - s2);
    }
    return worst;
  }

  double empirical_diameter() const override { return hi_ - lo_; }
  bool population_evaluable() const override { return true; }

  Vector evaluate_batch(const Vector& values, const Matrix& pts) const override {
    const Vector gv = group_values(values);
    Vector out(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      out[i] = interp(gv, pts(i, 0));
    return out;
  }

protected:
  Vector project_impl(const Vector& t, double tol) const override {
    const std::size_t g = xs_.size();
    const Vector gy = group_values(t);
    if (g <= 2) {
      // No curvature constraint; only the box (and ties) bind.
      Vector out(n_);
      for (std::size_t i = 0; i < group_of_.size(); ++i)
        out[Eigen::Index(i)] =
            std::clamp(gy[Eigen::Index(group_of_[i])], lo_, hi_);
      return out;
    }
    // Work in u = sqrt(w) .* v so the weighted projection becomes Euclidean.
    const Vector sw = weights_.cwiseSqrt();
    std::vector<ConvexPiece> pieces;
    for (std::size_t k = 0; k + 2 < g; ++k) {
      Vector a = Vector::Zero(Eigen::Index(g));
      const double dx1 = xs_[k + 1] - xs_[k];
      const double dx2 = xs_[k + 2] - xs_[k + 1];
      // slope_k - slope_{k+1} <= 0
      a[Eigen::Index(k)] = -1.0 / dx1;
      a[Eigen::Index(k + 1)] = 1.0 / dx1 + 1.0 / dx2;
      a[Eigen::Index(k + 2)] = -1.0 / dx2;
      // Constraint a.v <= 0 in v-space becomes (a ./ sqrt(w)).u <= 0.
      Vector au = a.cwiseQuotient(sw);
      pieces.push_back({[au](const Vector& u) {
                          return project_halfspace_leq(u, au, 0.0);
                        },
                        [au](const Vector& u) {
                          return std::max(0.0, au.dot(u));
                        }});
    }
    if (std::isfinite(lo_) || std::isfinite(hi_)) {
      const Vector lo_u = lo_ * sw, hi_u = hi_ * sw;
      pieces.push_back(
          {[lo_u, hi_u](const Vector& u) {
             return u.cwiseMax(lo_u).cwiseMin(hi_u);
           },
           [lo_u, hi_u](const Vector& u) {
             return std::max(
                 0.0, std::max((lo_u - u).maxCoeff(), (u - hi_u).maxCoeff()));
           }});
    }
    DykstraOptions opts;
    opts.tol = tol;
    const Vector u = dykstra(gy.cwiseProduct(sw), pieces, opts);
    const Vector gv = u.cwiseQuotient(sw);
    Vector out(n_);
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      out[Eigen::Index(i)] = gv[Eigen::Index(group_of_[i])];
    return out;
  }

  Vector sample_impl(Rng& rng) const override {
    if (!std::isfinite(lo_) || !std::isfinite(hi_))
      throw UnboundedClass(kind_name());
    // Random convex generator: affine part plus nonnegative hinge weights,
    // affinely squashed into the box when it pokes out (affine maps preserve
    // convexity of the sequence).
    const std::size_t g = xs_.size();
    Vector gv(static_cast<Eigen::Index>(g));
    const double span = xs_.back() - xs_.front();
    const double a = rng.uniform(lo_, hi_);
    const double b = rng.uniform(-1.0, 1.0) * (hi_ - lo_) /
                     std::max(span, 1e-12);
    const int hinges = 4;
    std::vector<double> knots(hinges), ws(hinges);
    for (int k = 0; k < hinges; ++k) {
      knots[std::size_t(k)] = rng.uniform(xs_.front(), xs_.back());
      ws[std::size_t(k)] = std::abs(rng.gaussian()) * (hi_ - lo_) /
                           std::max(span, 1e-12);
    }
    for (std::size_t i = 0; i < g; ++i) {
      double val = a + b * (xs_[i] - xs_.front());
      for (int k = 0; k < hinges; ++k)
        val += ws[std::size_t(k)] * std::max(0.0, xs_[i] - knots[std::size_t(k)]);
      gv[Eigen::Index(i)] = val;
    }
    const double mn = gv.minCoeff(), mx = gv.maxCoeff();
    if (mn < lo_ || mx > hi_) {
      const double room = hi_ - lo_;
      const double scale = std::min(1.0, room / std::max(mx - mn, 1e-12));
      const double off = rng.uniform(0.0, room - (mx - mn) * scale);
      for (Eigen::Index i = 0; i < gv.size(); ++i)
        gv[i] = lo_ + off + (gv[i] - mn) * scale;
    }
    Vector v(n_);
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      v[Eigen::Index(i)] = gv[Eigen::Index(group_of_[i])];
    return v;
  }

private:
  Vector group_values(const Vector& values) const {
    Vector gv = Vector::Zero(Eigen::Index(xs_.size()));
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      gv[Eigen::Index(group_of_[i])] += values[Eigen::Index(i)];
    return gv.cwiseQuotient(weights_);
  }

  double interp(const Vector& gv, double x) const {
    const std::size_t g = xs_.size();
    if (g == 1) return gv[0];
    std::size_t k;
    if (x <= xs_.front())
      k = 0;
    else if (x >= xs_.back())
      k = g - 2;
    else
      k = std::size_t(std::upper_bound(xs_.begin(), xs_.end(), x) -
                      xs_.begin() - 1);
    const double t = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return gv[Eigen::Index(k)] * (1.0 - t) + gv[Eigen::Index(k + 1)] * t;
  }

  std::vector<double> xs_;   // sorted unique design points
  Vector weights_;           // tie multiplicities
  std::vector<std::size_t> group_of_;
  double lo_, hi_;
};

// ---------------------------------------------------------------------------
// Lipschitz ball: |v_i - v_j| <= L d(x_i, x_j), |v_i| <= Gamma1
// ---------------------------------------------------------------------------

class LipschitzClass final : public FunctionClass {
public:
  LipschitzClass(const DesignSet& design, double L, double gamma1)
      : FunctionClass(design.n(), "LipschitzBall"),
        design_(design),
        L_(L),
        gamma1_(gamma1) {
    if (L < 0.0) throw ConfigInvalid("lipschitz_constant", "must be >= 0");
    if (design.d() == 1) {
      // Adjacent constraints on the sorted design are equivalent to all
      // pairs in one dimension.
      std::vector<Eigen::Index> order(std::size_t(design.n()));
      std::iota(order.begin(), order.end(), Eigen::Index(0));
      const auto& x = design.points;
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return x(a, 0) < x(b, 0);
                       });
      order_ = order;
      for (std::size_t k = 0; k + 1 < order.size(); ++k)
        pairs_.emplace_back(order[k], order[k + 1]);
    } else {
      for (Eigen::Index i = 0; i < design.n(); ++i)
        for (Eigen::Index j = i + 1; j < design.n(); ++j)
          pairs_.emplace_back(i, j);
    }
  }

  double violation(const Vector& v) const override {
    double worst = box_excess(v, -gamma1_, gamma1_);
    for (const auto& [i, j] : pairs_)
      worst = std::max(worst,
                       std::abs(v[i] - v[j]) - L_ * design_.distance(i, j));
    return worst;
  }

  double empirical_diameter() const override { return 2.0 * gamma1_; }
  bool population_evaluable() const override { return true; }

  Vector evaluate_batch(const Vector& values, const Matrix& pts) const override {
    Vector out(pts.rows());
    if (!order_.empty()) {
      // 1-d: for a member, the envelope is attained at the two neighboring
      // anchors of the sorted design.
      const Eigen::Index k = Eigen::Index(order_.size());
      Vector xs(k), vs(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        xs[i] = design_.points(order_[std::size_t(i)], 0);
        vs[i] = values[order_[std::size_t(i)]];
      }
      for (Eigen::Index p = 0; p < pts.rows(); ++p) {
        const double x = pts(p, 0);
        const double* begin = xs.data();
        const double* pos = std::lower_bound(begin, begin + k, x);
        double lo = -kInf, hi = kInf;
        if (pos != begin + k) {
          const Eigen::Index r = Eigen::Index(pos - begin);
          const double d = L_ * (xs[r] - x);
          lo = std::max(lo, vs[r] - d);
          hi = std::min(hi, vs[r] + d);
        }
        if (pos != begin) {
          const Eigen::Index l = Eigen::Index(pos - begin) - 1;
          const double d = L_ * (x - xs[l]);
          lo = std::max(lo, vs[l] - d);
          hi = std::min(hi, vs[l] + d);
        }
        out[p] = std::clamp((lo + hi) / 2.0, -gamma1_, gamma1_);
      }
      return out;
    }
    for (Eigen::Index p = 0; p < pts.rows(); ++p) {
      double lo = -kInf, hi = kInf;
      for (Eigen::Index i = 0; i < n_; ++i) {
        const double d = (design_.points.row(i) - pts.row(p)).norm();
        lo = std::max(lo, values[i] - L_ * d);
        hi = std::min(hi, values[i] + L_ * d);
      }
      out[p] = std::clamp((lo + hi) / 2.0, -gamma1_, gamma1_);
    }
    return out;
  }

  std::optional<std::pair<PointFn, PointFn>> interpolator_envelope(
      const Vector& values) const override {
    const Matrix anchors = design_.points;
    const Vector vals = values;
    const double L = L_, g1 = gamma1_;
    PointFn fmin = [anchors, vals, L, g1](const Eigen::RowVectorXd& x) {
      double lo = -kInf;
      for (Eigen::Index i = 0; i < anchors.rows(); ++i)
        lo = std::max(lo, vals[i] - L * (anchors.row(i) - x).norm());
      return std::clamp(lo, -g1, g1);
    };
    PointFn fmax = [anchors, vals, L, g1](const Eigen::RowVectorXd& x) {
      double hi = kInf;
      for (Eigen::Index i = 0; i < anchors.rows(); ++i)
        hi = std::min(hi, vals[i] + L * (anchors.row(i) - x).norm());
      return std::clamp(hi, -g1, g1);
    };
    return std::make_pair(fmin, fmax);
  }

protected:
  Vector project_impl(const Vector& t, double tol) const override {
    std::vector<ConvexPiece> pieces;
    pieces.reserve(pairs_.size() + 1);
    for (const auto& pr : pairs_) {
      const Eigen::Index i = pr.first, j = pr.second;
      const double c = L_ * design_.distance(i, j);
      pieces.push_back({[i, j, c](const Vector& v) {
                          return project_pair_slab(v, i, j, c);
                        },
                        [i, j, c](const Vector& v) {
                          return std::max(0.0, std::abs(v[i] - v[j]) - c);
                        }});
    }
    const double g1 = gamma1_;
    pieces.push_back({[g1](const Vector& v) {
                        return project_box(v, -g1, g1);
                      },
                      [g1](const Vector& v) {
                        return box_excess(v, -g1, g1);
                      }});
    DykstraOptions opts;
    opts.tol = tol;
    return dykstra(t, pieces, opts);
  }

  Vector sample_impl(Rng& rng) const override {
    // Sequentially feasible intervals; the assignment order follows the
    // sorted design in 1-d and the raw order otherwise.
    Vector v(n_);
    std::vector<Eigen::Index> order = order_;
    if (order.empty()) {
      order.resize(std::size_t(n_));
      std::iota(order.begin(), order.end(), Eigen::Index(0));
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
      double lo = -gamma1_, hi = gamma1_;
      for (std::size_t m = 0; m < k; ++m) {
        const double d = L_ * design_.distance(order[k], order[m]);
        lo = std::max(lo, v[order[m]] - d);
        hi = std::min(hi, v[order[m]] + d);
      }
      v[order[k]] = rng.uniform(lo, hi);
    }
    return v;
  }

private:
  DesignSet design_;
  double L_, gamma1_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs_;
  std::vector<Eigen::Index> order_;
};

// ---------------------------------------------------------------------------
// BallRestriction: inner ∩ B(center, radius)
// ---------------------------------------------------------------------------

class BallRestrictionClass final : public FunctionClass {
public:
  BallRestrictionClass(ClassPtr inner, Vector center, double radius)
      : FunctionClass(inner->n(), "BallRestriction"),
        inner_(std::move(inner)),
        center_(std::move(center)),
        radius_(radius) {
    if (center_.size() != n_)
      throw DimensionMismatch(std::size_t(n_), std::size_t(center_.size()));
    if (radius < 0.0) throw ConfigInvalid("radius", "must be >= 0");
  }

  double violation(const Vector& v) const override {
    return std::max(inner_->violation(v),
                    std::max(0.0, (v - center_).norm() - radius_));
  }

  double empirical_diameter() const override {
    return std::min(inner_->empirical_diameter(),
                    2.0 * radius_ / std::sqrt(double(n_)));
  }

  bool population_evaluable() const override {
    return inner_->population_evaluable();
  }
  Vector evaluate_batch(const Vector& values, const Matrix& pts) const override {
    return inner_->evaluate_batch(values, pts);
  }

protected:
  Vector project_impl(const Vector& t, double tol) const override {
    // If the inner projection already lands in the ball it is the projection
    // onto the intersection.
    Vector p = inner_->project(t, tol);
    if ((p - center_).norm() <= radius_) return p;
    const ClassPtr inner = inner_;
    const Vector c = center_;
    const double r = radius_;
    std::vector<ConvexPiece> pieces = {
        {[inner, tol](const Vector& v) { return inner->project(v, tol); },
         [inner](const Vector& v) { return inner->violation(v); }},
        {[c, r](const Vector& v) { return project_ball(v, c, r); },
         [c, r](const Vector& v) {
           return std::max(0.0, (v - c).norm() - r);
         }}};
    DykstraOptions opts;
    opts.tol = tol;
    return dykstra(t, pieces, opts);
  }

  Vector sample_impl(Rng& rng) const override {
    const Vector v = inner_->sample_member_with(rng);
    if ((v - center_).norm() <= radius_) return v;
    return project_impl(v, kDefaultTol);
  }

private:
  ClassPtr inner_;
  Vector center_;
  double radius_;
};

}  // namespace

// Factories ------------------------------------------------------------------

ClassPtr make_whole_space(Eigen::Index n) {
  return std::make_shared<WholeSpaceClass>(n);
}
ClassPtr make_constants(Eigen::Index n, double lo, double hi) {
  return std::make_shared<ConstantsClass>(n, lo, hi);
}
ClassPtr make_polynomial(const DesignSet& design, int degree,
                         double coeff_bound) {
  return std::make_shared<PolynomialClass>(design, degree, coeff_bound);
}
ClassPtr make_ball(Vector center, double radius) {
  return std::make_shared<BallClass>(std::move(center), radius);
}
ClassPtr make_box(Eigen::Index n, double lo, double hi) {
  return std::make_shared<BoxClass>(n, lo, hi);
}
ClassPtr make_halfspace(Eigen::Index n, Eigen::Index coord) {
  return std::make_shared<HalfSpaceClass>(n, coord);
}
ClassPtr make_isotonic(Eigen::Index n, double lo, double hi) {
  return std::make_shared<IsotonicClass>(n, std::nullopt, lo, hi);
}
ClassPtr make_isotonic(const DesignSet& design, double lo, double hi) {
  return std::make_shared<IsotonicClass>(design.n(), design, lo, hi);
}
ClassPtr make_isotonic_order(
    Eigen::Index n, std::vector<std::pair<Eigen::Index, Eigen::Index>> edges,
    double lo, double hi) {
  return std::make_shared<IsotonicOrderClass>(n, std::move(edges), lo, hi);
}
ClassPtr make_convex_regression(const DesignSet& design, double lo, double hi) {
  return std::make_shared<ConvexRegressionClass>(design, lo, hi);
}
ClassPtr make_lipschitz(const DesignSet& design, double lipschitz_constant,
                        double gamma1) {
  return std::make_shared<LipschitzClass>(design, lipschitz_constant, gamma1);
}
ClassPtr restrict_to_ball(ClassPtr inner, Vector center, double radius) {
  return std::make_shared<BallRestrictionClass>(std::move(inner),
                                                std::move(center), radius);
}

// Population distance ---------------------------------------------------------

PopDistance population_distance(const PopulationSampler& sampler,
                                const Member& f, const Member& g,
                                Eigen::Index m, std::uint64_t seed) {
  if (m < 1) throw ConfigInvalid("m", "needs at least one fresh covariate");
  const Matrix pts = sampler.sample_points(m, seed);
  const Vector fa = f.at(pts);
  const Vector gb = g.at(pts);
  std::vector<double> sq(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = fa[i] - gb[i];
    sq[std::size_t(i)] = d * d;
  }
  const auto ms = mean_se(sq);
  PopDistance out;
  out.dist_sq = ms.value;
  out.se_sq = ms.se;
  out.dist = std::sqrt(std::max(0.0, ms.value));
  out.m = m;
  out.seed = seed;
  return out;
}

// FstarRule -------------------------------------------------------------------

Vector FstarRule::at_points(const Matrix& pts) const {
  switch (kind) {
    case Kind::Zero:
      return Vector::Zero(pts.rows());
    case Kind::Constant:
      return Vector::Constant(pts.rows(), c0);
    case Kind::Linear:
      return Vector::Constant(pts.rows(), c0) + c1 * pts.col(0);
    case Kind::Values:
      throw EvaluationUnavailable("fstar(values)");
  }
  return Vector();
}

Vector FstarRule::at_design(const DesignSet& design) const {
  if (kind == Kind::Values) {
    if (values.size() != design.n())
      throw DimensionMismatch(std::size_t(design.n()),
                              std::size_t(values.size()));
    return values;
  }
  return at_points(design.points);
}

}  // namespace ermlab
