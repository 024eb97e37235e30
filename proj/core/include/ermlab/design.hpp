#pragma once

#include <cstdint>

#include "ermlab/norms.hpp"

namespace ermlab {

/// The n covariate points of one experiment, one row per point. Distances
/// between points use the Euclidean metric on R^d.
struct DesignSet {
  Matrix points;  // n x d

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index d() const { return points.cols(); }

  double distance(Eigen::Index i, Eigen::Index j) const {
    return (points.row(i) - points.row(j)).norm();
  }

  /// Throws ConfigInvalid when empty, dimensionless, or non-finite.
  void validate() const;

  static DesignSet from_1d(const Vector& xs);

  /// Equispaced grid i/(n-1) on [0, 1] (single point 0.5 when n = 1).
  static DesignSet grid_1d(Eigen::Index n);
};

/// A distribution over covariates, with seeded sampling: the source of fresh
/// designs and of the fresh batches behind every L2(P) norm estimate.
struct PopulationSampler {
  enum class Dist { Uniform01, Gaussian };

  Dist dist = Dist::Uniform01;
  Eigen::Index dim = 1;

  Matrix sample_points(Eigen::Index m, std::uint64_t seed) const;
  DesignSet sample_design(Eigen::Index n, std::uint64_t seed) const {
    return DesignSet{sample_points(n, seed)};
  }
};

}  // namespace ermlab
