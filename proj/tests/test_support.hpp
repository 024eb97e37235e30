// Shared fixtures: one representative instance per class kind.
#pragma once

#include <string>
#include <vector>

#include "ermlab/classes.hpp"
#include "ermlab/rng.hpp"

namespace test_support {

struct KindFixture {
  std::string name;
  ermlab::ClassPtr cls;
  double target_scale = 2.0;  // spread of random projection targets
  bool samplable = true;
};

inline std::vector<KindFixture> all_kind_fixtures(Eigen::Index n = 16) {
  using namespace ermlab;
  const DesignSet grid = DesignSet::grid_1d(n);
  std::vector<KindFixture> out;
  out.push_back({"constants", make_constants(n, -1.0, 1.0)});
  out.push_back({"whole-space", make_whole_space(n), 2.0, false});
  out.push_back({"polynomial", make_polynomial(grid, 3), 2.0, true});
  out.push_back({"ball", make_ball(Vector::Constant(n, 0.3), 2.0)});
  out.push_back({"box", make_box(n, 0.0, 1.0)});
  out.push_back({"halfspace", make_halfspace(n), 2.0, false});
  out.push_back({"isotonic", make_isotonic(grid, -1.0, 1.0)});
  {
    // A small non-chain partial order: a binary tree on 9 vertices.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
    for (Eigen::Index i = 1; i < 9; ++i) edges.emplace_back((i - 1) / 2, i);
    out.push_back({"isotonic-order", make_isotonic_order(9, edges, -1.0, 1.0)});
  }
  out.push_back({"convex-regression", make_convex_regression(grid, -1.0, 1.0)});
  out.push_back({"lipschitz", make_lipschitz(grid, 1.0, 1.0), 1.2});
  out.push_back({"ball-restriction",
                 restrict_to_ball(make_isotonic(grid, -1.0, 1.0),
                                  Vector::Zero(n), 0.5 * std::sqrt(double(n)))});
  return out;
}

/// A class member for probing: sampled when the class is bounded, otherwise
/// the projection of a perturbed point (always a member).
inline ermlab::Vector any_member(const ermlab::FunctionClass& cls,
                                 ermlab::Rng& rng,
                                 const ermlab::Vector& anchor) {
  if (cls.bounded()) return cls.sample_member_with(rng);
  return cls.project(anchor + rng.gaussian_vector(cls.n()));
}

}  // namespace test_support
