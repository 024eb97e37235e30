#include "ermlab/design.hpp"

#include <cmath>

#include "ermlab/errors.hpp"
#include "ermlab/rng.hpp"

namespace ermlab {

void DesignSet::validate() const {
  if (points.rows() < 1) throw ConfigInvalid("design", "needs n >= 1 points");
  if (points.cols() < 1) throw ConfigInvalid("design", "needs dimension >= 1");
  if (!points.allFinite())
    throw ConfigInvalid("design", "points must be finite");
}

DesignSet DesignSet::from_1d(const Vector& xs) {
  DesignSet d;
  d.points = xs;
  return d;
}

DesignSet DesignSet::grid_1d(Eigen::Index n) {
  Vector xs(n);
  if (n == 1) {
    xs[0] = 0.5;
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      xs[i] = double(i) / double(n - 1);
  }
  return from_1d(xs);
}

Matrix PopulationSampler::sample_points(Eigen::Index m,
                                        std::uint64_t seed) const {
  Rng rng(seed);
  Matrix pts(m, dim);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      pts(i, j) = dist == Dist::Uniform01 ? rng.uniform01() : rng.gaussian();
  return pts;
}

}  // namespace ermlab
