#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ermlab/erm.hpp"
#include "ermlab/norms.hpp"

namespace ermlab {

/// F_q^{n+1} with its hyperplanes through the origin: the measurable form of
/// the distribution-unaware counterexample. Only prime q; arithmetic is
/// plain modular arithmetic.
class FiniteFieldModel {
public:
  FiniteFieldModel(int q, int n);

  int q() const { return q_; }
  int n() const { return n_; }
  int ambient_dim() const { return n_ + 1; }
  std::size_t hyperplane_count() const { return hyperplanes_.size(); }
  std::size_t point_count() const { return points_.size(); }  // excludes 0

  /// Point ids index F_q^{n+1} \ {0}.
  const std::vector<std::vector<int>>& points() const { return points_; }
  /// Canonical normal vectors (first nonzero coordinate = 1).
  const std::vector<std::vector<int>>& hyperplanes() const {
    return hyperplanes_;
  }

  bool in_hyperplane(std::size_t point_id, std::size_t h_id) const {
    return membership_[h_id][point_id];
  }
  const std::vector<std::size_t>& hyperplane_points(std::size_t h_id) const {
    return h_points_[h_id];
  }

  /// Hyperplane spanned by the tuple, or nullopt when the span is deficient.
  std::optional<std::size_t> span_hyperplane(
      const std::vector<std::size_t>& tuple) const;

private:
  int q_, n_;
  std::vector<std::vector<int>> points_;
  std::vector<std::vector<int>> hyperplanes_;
  std::vector<std::vector<char>> membership_;      // h_id -> point_id -> in H
  std::vector<std::vector<std::size_t>> h_points_;  // points of each H
};

/// What an estimator returns: the indicator 1_H of a hyperplane or the
/// complement 1 - 1_H.
struct EstimatorChoice {
  bool complement = false;
  std::size_t hyperplane = 0;
};

/// Deterministic estimator rule: sees the span of the sample and the (first)
/// observed label, returns a class extreme point.
using EstimatorRule = std::function<EstimatorChoice(std::size_t span, int label)>;

EstimatorRule trust_span_rule();
EstimatorRule distrust_span_rule(const FiniteFieldModel& model);

struct FiniteFieldRiskRow {
  std::string fstar_id;
  std::string distribution_id;
  double risk = 0.0;          // data and error both under distribution_id
  double risk_ambient = 0.0;  // data under distribution_id, error under P
};

struct FiniteFieldReport {
  int q = 0, n = 0;
  std::size_t hyperplane_count = 0;
  std::vector<double> p_h0, p_h1;  // per-hyperplane, full-span conditioned
  double p0 = 0.0, p1 = 0.0;       // via direct P enumeration
  double p0_fubini = 0.0, p1_fubini = 0.0;  // via mean over hyperplanes
  bool fubini_exact = false;       // integer-count equality of the two routes
  double du_lower_bound = 0.0;     // max(p1, 1 - p1)
  std::vector<FiniteFieldRiskRow> risk_table;
  bool exact_enumeration = true;
};

struct FiniteFieldOptions {
  std::size_t tuple_budget = 1000000;  // exact enumeration cap
  bool allow_sampling = true;
  std::size_t sample_tuples = 200000;
  std::uint64_t seed = 1;
};

/// Exact (or, above budget, seeded Monte Carlo) evaluation of an estimator
/// rule on the finite-field model. All probabilities condition on the sample
/// spanning a full hyperplane; the q > n regime makes the excluded mass
/// O(1/q), matching the measure-zero degeneracies of the continuous picture.
FiniteFieldReport finite_field_demo(int q, int n, const EstimatorRule& rule,
                                    const FiniteFieldOptions& opts = {});

struct HalfspaceDemoRow {
  double delta = 0.0;
  double diameter = 0.0;       // Monte Carlo mean over interior draws
  double diameter_se = 0.0;
  double predicted = 0.0;      // 2 sqrt(delta)
  double rel_deviation = 0.0;  // |diameter / predicted - 1|
};

/// O_delta diameter on the half-space class with fstar on the boundary,
/// conditioned on interior observations (y_1 > 0): the stability-threshold
/// breakdown table against the exact ball geometry 2 sqrt(delta).
std::vector<HalfspaceDemoRow> halfspace_stability_demo(
    Eigen::Index n, const std::vector<double>& delta_grid,
    const NoiseModel& model, int R, std::uint64_t seed, int directions = 32,
    double tol = kDefaultTol);

}  // namespace ermlab
