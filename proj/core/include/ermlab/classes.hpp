#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ermlab/design.hpp"
#include "ermlab/norms.hpp"
#include "ermlab/projections.hpp"
#include "ermlab/rng.hpp"

namespace ermlab {

constexpr double kDefaultTol = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

class FunctionClass;
using ClassPtr = std::shared_ptr<const FunctionClass>;

/// A function on the covariate space, evaluable anywhere; used for the
/// interpolator envelopes behind the generalization diameter.
using PointFn = std::function<double(const Eigen::RowVectorXd&)>;

/// A convex function class realized at a fixed design: a closed convex body
/// F_n in R^n with projection and membership oracles, plus (for the kinds
/// that carry function-space semantics) evaluation off the design.
class FunctionClass {
public:
  virtual ~FunctionClass() = default;

  Eigen::Index n() const { return n_; }
  const std::string& kind_name() const { return kind_name_; }

  /// Euclidean projection of target onto F_n, certified to tol.
  Vector project(const Vector& target, double tol = kDefaultTol) const;

  /// Max constraint violation: 0 on F_n, positive and continuous outside.
  virtual double violation(const Vector& v) const = 0;

  /// A member of F_n, deterministic per seed; uniform on the body where an
  /// exact construction exists, support-dense otherwise.
  Vector sample_member(std::uint64_t seed) const;

  /// Same, drawing from a live generator (for composite classes and pools).
  Vector sample_member_with(Rng& rng) const { return sample_impl(rng); }

  /// Diameter of F_n in the empirical norm (may be +inf).
  virtual double empirical_diameter() const = 0;
  bool bounded() const { return std::isfinite(empirical_diameter()); }
  virtual bool diameter_unbounded() const { return !bounded(); }

  /// Whether members act as functions beyond the design points.
  virtual bool population_evaluable() const { return false; }

  /// Values of the member (given by its design values) at fresh points.
  virtual Vector evaluate_batch(const Vector& values, const Matrix& pts) const;

  /// Pointwise-smallest and -largest class functions agreeing with `values`
  /// at the design; their population distance is the exact generalization
  /// diameter at that member. Returns nullopt when the interpolator set is
  /// unbounded; throws InterpolatorSamplingUnavailable for kinds with no
  /// interpolator structure.
  virtual std::optional<std::pair<PointFn, PointFn>> interpolator_envelope(
      const Vector& values) const;

protected:
  FunctionClass(Eigen::Index n, std::string kind_name)
      : n_(n), kind_name_(std::move(kind_name)) {}

  virtual Vector project_impl(const Vector& target, double tol) const = 0;
  virtual Vector sample_impl(Rng& rng) const = 0;

  Eigen::Index n_;
  std::string kind_name_;
};

// Factories. Bounds may be +-inf where a kind tolerates an unbounded body
// (such classes refuse sample_member).
ClassPtr make_whole_space(Eigen::Index n);
ClassPtr make_constants(Eigen::Index n, double lo = -1.0, double hi = 1.0);
ClassPtr make_polynomial(const DesignSet& design, int degree,
                         double coeff_bound = 1.0);
ClassPtr make_ball(Vector center, double radius);
ClassPtr make_box(Eigen::Index n, double lo = 0.0, double hi = 1.0);
ClassPtr make_halfspace(Eigen::Index n, Eigen::Index coord = 0);
/// Chain order by index when no design is given; chain order of sorted x for
/// a 1-d design (ties forced equal). Bounds default to the unit scale.
ClassPtr make_isotonic(Eigen::Index n, double lo = -1.0, double hi = 1.0);
ClassPtr make_isotonic(const DesignSet& design, double lo = -1.0,
                       double hi = 1.0);
/// General partial order: edges (i, j) meaning v_i <= v_j.
ClassPtr make_isotonic_order(
    Eigen::Index n, std::vector<std::pair<Eigen::Index, Eigen::Index>> edges,
    double lo = -1.0, double hi = 1.0);
ClassPtr make_convex_regression(const DesignSet& design, double lo = -1.0,
                                double hi = 1.0);
ClassPtr make_lipschitz(const DesignSet& design, double lipschitz_constant = 1.0,
                        double gamma1 = 1.0);
/// F ∩ B(center, radius) with a Euclidean radius; projection via Dykstra.
ClassPtr restrict_to_ball(ClassPtr inner, Vector center, double radius);

/// A class kind instantiable at any design (random-design experiments).
using ClassFamily = std::function<ClassPtr(const DesignSet&)>;

/// A class member bound to its class: design values plus off-design
/// semantics.
struct Member {
  ClassPtr cls;
  Vector values;

  Vector at(const Matrix& pts) const { return cls->evaluate_batch(values, pts); }
};

struct PopDistance {
  double dist = 0.0;     // estimate of ||f - g||_{L2(P)}
  double dist_sq = 0.0;  // unbiased estimate of the squared distance
  double se_sq = 0.0;    // standard error of dist_sq
  Eigen::Index m = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of the L2(P) distance between two members on m fresh
/// covariates.
PopDistance population_distance(const PopulationSampler& sampler,
                                const Member& f, const Member& g,
                                Eigen::Index m, std::uint64_t seed);

/// The regression function f*: evaluable at any points and at a design.
struct FstarRule {
  enum class Kind { Zero, Constant, Linear, Values };
  Kind kind = Kind::Zero;
  double c0 = 0.0;  // Constant value, or Linear intercept
  double c1 = 0.0;  // Linear slope (first covariate coordinate)
  Vector values;    // Values kind: design values (fixed design only)

  Vector at_design(const DesignSet& design) const;
  Vector at_points(const Matrix& pts) const;
  bool population_evaluable() const { return kind != Kind::Values; }
};

}  // namespace ermlab
