#include <doctest.h>

#include "ermlab/classes.hpp"
#include "ermlab/errors.hpp"
#include "ermlab/erm.hpp"
#include "ermlab/projections.hpp"
#include "ermlab/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ermlab;

TEST_CASE("pava matches the spec example") {
  Vector y(3);
  y << 3, 1, 2;
  const Vector p = pava(y);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(2.0));
  CHECK(p[2] == doctest::Approx(2.0));
}

TEST_CASE("pava against the dual-QP oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng.index(11));
    const Vector y = 3.0 * rng.gaussian_vector(n);
    const auto [A, b] = oracles::isotonic_constraints(n);
    const Vector expected = oracles::qp_project(y, A, b);
    const Vector got = pava(y);
    CHECK((got - expected).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("weighted pava solves the tie-merged problem") {
  // Merging duplicate design points with averaged targets and weights must
  // agree with the unmerged QP with explicit equality (slab c = 0).
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Vector y(4);
    for (int i = 0; i < 4; ++i) y[i] = 2.0 * rng.gaussian();
    // Coordinates 1 and 2 are tied.
    Vector gy(3), gw(3);
    gy << y[0], 0.5 * (y[1] + y[2]), y[3];
    gw << 1, 2, 1;
    const Vector merged = pava_weighted(gy, gw);

    Matrix A = Matrix::Zero(5, 4);
    Vector b = Vector::Zero(5);
    A(0, 0) = 1, A(0, 1) = -1;
    A(1, 1) = 1, A(1, 2) = -1;
    A(2, 2) = 1, A(2, 3) = -1;
    A(3, 1) = 1, A(3, 2) = -1;   // v2 <= v3
    A(4, 1) = -1, A(4, 2) = 1;   // v3 <= v2
    const Vector expected = oracles::qp_project(y, A, b);
    CHECK(merged[0] == doctest::Approx(expected[0]).epsilon(1e-6));
    CHECK(merged[1] == doctest::Approx(expected[1]).epsilon(1e-6));
    CHECK(merged[2] == doctest::Approx(expected[3]).epsilon(1e-6));
  }
}

TEST_CASE("convex regression projection against the dual-QP oracle") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 3 + Eigen::Index(rng.index(10));
    std::vector<double> xs(static_cast<std::size_t>(n));
    double x = 0.0;
    for (auto& v : xs) {
      x += 0.2 + rng.uniform01();
      v = x;
    }
    DesignSet design = DesignSet::from_1d(
        Eigen::Map<const Vector>(xs.data(), n));
    const auto cls = make_convex_regression(design, -kInf, kInf);
    const Vector y = 2.0 * rng.gaussian_vector(n);
    const auto [A, b] = oracles::convexreg_constraints(xs);
    const Vector expected = oracles::qp_project(y, A, b);
    const Vector got = cls->project(y, 1e-10);
    CHECK((got - expected).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("bounded isotonic equals clamp of pava and the QP oracle") {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(rng.index(9));
    const Vector y = 3.0 * rng.gaussian_vector(n);
    const auto cls = make_isotonic(n, -1.0, 1.0);
    auto [A, b] = oracles::isotonic_constraints(n);
    std::tie(A, b) = oracles::with_box(A, b, -1.0, 1.0, n);
    const Vector expected = oracles::qp_project(y, A, b);
    const Vector got = cls->project(y);
    CHECK((got - expected).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("general-order isotonic agrees with chain pava on a path") {
  Rng rng(15);
  const Eigen::Index n = 8;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
  for (Eigen::Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  const auto chain = make_isotonic(n, -2.0, 2.0);
  const auto order = make_isotonic_order(n, edges, -2.0, 2.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Vector y = 2.0 * rng.gaussian_vector(n);
    const Vector a = chain->project(y);
    const Vector c = order->project(y);
    CHECK((a - c).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("lipschitz projection against the dual-QP oracle") {
  Rng rng(16);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = 3 + Eigen::Index(rng.index(8));
    const DesignSet design = DesignSet::grid_1d(n);
    const double L = 1.0, g1 = 1.0;
    const auto cls = make_lipschitz(design, L, g1);
    const Vector y = 1.5 * rng.gaussian_vector(n);

    // All-pairs slab constraints plus the box.
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        Vector r = Vector::Zero(n);
        r[i] = 1.0;
        r[j] = -1.0;
        rows.push_back(r);
        rhs.push_back(L * design.distance(i, j));
        rows.push_back(-r);
        rhs.push_back(L * design.distance(i, j));
      }
    Matrix A(Eigen::Index(rows.size()), n);
    Vector b(Eigen::Index(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      A.row(Eigen::Index(k)) = rows[k].transpose();
      b[Eigen::Index(k)] = rhs[k];
    }
    std::tie(A, b) = oracles::with_box(A, b, -g1, g1, n);
    const Vector expected = oracles::qp_project(y, A, b);
    const Vector got = cls->project(y);
    CHECK((got - expected).lpNorm<Eigen::Infinity>() < 2e-6);
  }
}

TEST_CASE("projection examples from the class contracts") {
  SUBCASE("halfspace clamps the constrained coordinate") {
    const auto cls = make_halfspace(2);
    Vector y(2);
    y << -1, 2;
    const Vector p = cls->project(y);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(2.0));
  }
  SUBCASE("whole space projects to itself") {
    const auto cls = make_whole_space(3);
    Vector y(3);
    y << 0.3, -7, 2;
    CHECK((cls->project(y) - y).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("projection properties per class kind") {
  Rng rng(17);
  for (const auto& fixture : test_support::all_kind_fixtures()) {
    CAPTURE(fixture.name);
    const auto& cls = *fixture.cls;
    const Eigen::Index n = cls.n();
    const double tol = kDefaultTol;

    SUBCASE("idempotence") {
      for (int t = 0; t < 60; ++t) {
        const Vector y = fixture.target_scale * rng.gaussian_vector(n);
        const Vector p = cls.project(y);
        const Vector pp = cls.project(p);
        CHECK(norm_n(pp - p) <= 2.0 * tol);
      }
    }
    SUBCASE("contraction") {
      for (int t = 0; t < 120; ++t) {
        const Vector a = fixture.target_scale * rng.gaussian_vector(n);
        const Vector b = fixture.target_scale * rng.gaussian_vector(n);
        CHECK(norm_n(cls.project(a) - cls.project(b)) <=
              norm_n(a - b) + 10.0 * tol);
      }
    }
    SUBCASE("variational inequality") {
      for (int t = 0; t < 20; ++t) {
        const Vector y = fixture.target_scale * rng.gaussian_vector(n);
        const Vector v = cls.project(y);
        for (int k = 0; k < 25; ++k) {
          const Vector u = test_support::any_member(cls, rng, y);
          CHECK(dot_n(u - v, y - v) <= 10.0 * tol);
        }
      }
    }
    SUBCASE("membership of projections") {
      for (int t = 0; t < 40; ++t) {
        const Vector y = fixture.target_scale * rng.gaussian_vector(n);
        CHECK(cls.violation(cls.project(y)) <= tol);
      }
    }
  }
}

TEST_CASE("dykstra nonconvergence surfaces as an error") {
  // An intersection certified only to an absurd tolerance within one sweep.
  std::vector<ConvexPiece> pieces = {
      {[](const Vector& v) {
         Vector o = v;
         o[0] = 0.0;
         return o;
       },
       [](const Vector& v) { return std::abs(v[0]); }},
      {[](const Vector& v) {
         Vector o = v;
         o[1] = 0.0;
         return o;
       },
       [](const Vector& v) { return std::abs(v[1]); }}};
  DykstraOptions opts;
  opts.tol = 1e-8;
  opts.max_sweeps = 0;
  Vector y(2);
  y << 1, 1;
  CHECK_THROWS_AS(dykstra(y, pieces, opts), NonConvergence);
}
