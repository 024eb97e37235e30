#pragma once

#include <Eigen/Core>

namespace ermlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Empirical norm: Euclidean scaled by 1/sqrt(n).
inline double norm_n(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.norm() / std::sqrt(double(v.size()));
}

inline double sq_norm_n(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.squaredNorm() / double(v.size());
}

/// Empirical inner product <a, b>_n = (1/n) sum a_i b_i.
inline double dot_n(const Vector& a, const Vector& b) {
  return a.size() == 0 ? 0.0 : a.dot(b) / double(a.size());
}

}  // namespace ermlab
