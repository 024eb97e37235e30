// Test-only oracles, independent of the library's projection paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracles {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Euclidean projection onto {v : A v <= b} via accelerated projected
/// gradient on the nonnegativity-constrained dual. Small problems only.
inline Vector qp_project(const Vector& y, const Matrix& A, const Vector& b,
                         double tol = 1e-10, std::size_t max_iter = 2000000) {
  const Eigen::Index m = A.rows();
  if (m == 0) return y;
  const Matrix gram = A * A.transpose();
  const double lipschitz =
      gram.selfadjointView<Eigen::Lower>().eigenvalues().real().maxCoeff();
  const double step = 1.0 / std::max(lipschitz, 1e-12);
  const Vector q = A * y - b;

  Vector lambda = Vector::Zero(m), momentum = lambda, prev = lambda;
  double t_acc = 1.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Vector grad = gram * momentum - q;
    prev = lambda;
    lambda = (momentum - step * grad).cwiseMax(0.0);
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc)) / 2.0;
    momentum = lambda + ((t_acc - 1.0) / t_next) * (lambda - prev);
    t_acc = t_next;
    if (it % 200 == 0) {
      // KKT: primal feasibility, complementarity, projected-gradient
      // stationarity.
      const Vector slack = A * (y - A.transpose() * lambda) - b;
      const Vector kkt_grad = gram * lambda - q;  // equals -slack
      const double feas = slack.maxCoeff();
      const double comp = lambda.dot(slack.cwiseAbs());
      const double stat =
          (lambda - (lambda - step * kkt_grad).cwiseMax(0.0))
              .lpNorm<Eigen::Infinity>();
      if (feas <= tol && std::abs(comp) <= tol && stat <= tol * step) break;
    }
  }
  return y - A.transpose() * lambda;
}

/// Constraint matrix of the chain-isotonic cone: v_i - v_{i+1} <= 0.
inline std::pair<Matrix, Vector> isotonic_constraints(Eigen::Index n) {
  Matrix A = Matrix::Zero(n - 1, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    A(i, i) = 1.0;
    A(i, i + 1) = -1.0;
  }
  return {A, Vector::Zero(n - 1)};
}

/// Convex-regression constraints on sorted xs: slope_i - slope_{i+1} <= 0.
inline std::pair<Matrix, Vector> convexreg_constraints(
    const std::vector<double>& xs) {
  const Eigen::Index n = Eigen::Index(xs.size());
  Matrix A = Matrix::Zero(std::max<Eigen::Index>(n - 2, 0), n);
  for (Eigen::Index i = 0; i + 2 < n; ++i) {
    const double dx1 = xs[std::size_t(i + 1)] - xs[std::size_t(i)];
    const double dx2 = xs[std::size_t(i + 2)] - xs[std::size_t(i + 1)];
    A(i, i) = -1.0 / dx1;
    A(i, i + 1) = 1.0 / dx1 + 1.0 / dx2;
    A(i, i + 2) = -1.0 / dx2;
  }
  return {A, Vector::Zero(A.rows())};
}

/// Appends box rows lo <= v_i <= hi to (A, b).
inline std::pair<Matrix, Vector> with_box(const Matrix& A, const Vector& b,
                                          double lo, double hi,
                                          Eigen::Index n) {
  Matrix A2(A.rows() + 2 * n, n);
  Vector b2(A.rows() + 2 * n);
  A2.topRows(A.rows()) = A;
  b2.head(A.rows()) = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    A2.row(A.rows() + 2 * i).setZero();
    A2(A.rows() + 2 * i, i) = 1.0;
    b2(A.rows() + 2 * i) = hi;
    A2.row(A.rows() + 2 * i + 1).setZero();
    A2(A.rows() + 2 * i + 1, i) = -1.0;
    b2(A.rows() + 2 * i + 1) = -lo;
  }
  return {A2, b2};
}

/// Centroid of {v in [0,1]^3 : v1 <= v2 <= v3} by grid quadrature. Cells
/// straddling an ordering plane get half weight per tie, which keeps the
/// quadrature bias at O(steps^-2).
inline Vector monotone_cube_centroid_grid(int steps = 120) {
  Vector acc = Vector::Zero(3);
  double count = 0.0;
  for (int a = 0; a < steps; ++a)
    for (int bb = a; bb < steps; ++bb)
      for (int c = bb; c < steps; ++c) {
        double w = 1.0;
        if (a == bb) w *= 0.5;
        if (bb == c) w *= 0.5;
        acc[0] += w * (a + 0.5) / steps;
        acc[1] += w * (bb + 0.5) / steps;
        acc[2] += w * (c + 0.5) / steps;
        count += w;
      }
  return acc / count;
}

/// Hand bisection for log N(eps) = c n eps^2, used against solve_balancing.
template <typename Curve>
double hand_balance(const Curve& curve, double n, double c) {
  double lo = 1e-9, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (curve(mid) - c * n * mid * mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles
