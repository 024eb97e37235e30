#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ermlab/norms.hpp"

namespace ermlab {

/// Pool-adjacent-violators: exact Euclidean projection onto the isotonic
/// (nondecreasing) cone, optionally under positive coordinate weights.
Vector pava(const Vector& y);
Vector pava_weighted(const Vector& y, const Vector& w);

/// Projection onto the half-space {v : a.v <= b}.
Vector project_halfspace_leq(const Vector& v, const Vector& a, double b);

/// Projection onto the slab {v : |v_i - v_j| <= c}, c >= 0.
Vector project_pair_slab(const Vector& v, Eigen::Index i, Eigen::Index j,
                         double c);

/// Projection onto the Euclidean ball B(center, radius).
Vector project_ball(const Vector& v, const Vector& center, double radius);

/// Projection onto the box [lo, hi]^n.
Vector project_box(const Vector& v, double lo, double hi);

/// One convex set inside a Dykstra cycle: an exact projector plus a
/// violation functional (0 on the set, positive and continuous outside).
struct ConvexPiece {
  std::function<Vector(const Vector&)> project;
  std::function<double(const Vector&)> violation;
};

struct DykstraOptions {
  double tol = 1e-8;          // target accuracy of the composite projection
  std::size_t max_sweeps = 100000;
};

/// Dykstra's alternating projections onto the intersection of the pieces.
/// Converges to the exact projection for closed convex sets with nonempty
/// intersection; throws NonConvergence when the sweep cap is hit before the
/// stopping rule (sweep displacement and worst violation under tol) fires.
Vector dykstra(const Vector& target, const std::vector<ConvexPiece>& pieces,
               const DykstraOptions& opts = {});

}  // namespace ermlab
