#include <doctest.h>

#include "ermlab/classes.hpp"
#include "ermlab/errors.hpp"
#include "ermlab/rng.hpp"
#include "ermlab/stats.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace ermlab;

TEST_CASE("violation examples") {
  SUBCASE("ball boundary point") {
    const auto cls = make_ball(Vector::Zero(2), 1.0);
    Vector v(2);
    v << 0.6, 0.8;
    CHECK(cls->violation(v) == doctest::Approx(0.0));
  }
  SUBCASE("ball exterior point") {
    const auto cls = make_ball(Vector::Zero(2), 1.0);
    Vector v(2);
    v << 3, 4;
    CHECK(cls->violation(v) == doctest::Approx(4.0));
  }
  SUBCASE("isotonic order violation") {
    const auto cls = make_isotonic(2, -kInf, kInf);
    Vector v(2);
    v << 2, 1;
    CHECK(cls->violation(v) == doctest::Approx(1.0));
  }
  SUBCASE("dimension mismatch") {
    const auto cls = make_ball(Vector::Zero(2), 1.0);
    CHECK_THROWS_AS(cls->project(Vector::Zero(3)), DimensionMismatch);
  }
}

TEST_CASE("sample_member basics and determinism") {
  SUBCASE("box membership") {
    const auto cls = make_box(8, 0.0, 1.0);
    for (std::uint64_t s = 1; s <= 20; ++s) {
      const Vector v = cls->sample_member(s);
      CHECK(v.minCoeff() >= 0.0);
      CHECK(v.maxCoeff() <= 1.0);
    }
  }
  SUBCASE("ball membership") {
    const auto cls = make_ball(Vector::Zero(6), 1.0);
    for (std::uint64_t s = 1; s <= 20; ++s)
      CHECK(cls->sample_member(s).norm() <= 1.0 + kDefaultTol);
  }
  SUBCASE("same seed reproduces the member") {
    for (const auto& fixture : test_support::all_kind_fixtures()) {
      if (!fixture.samplable) continue;
      CAPTURE(fixture.name);
      const Vector a = fixture.cls->sample_member(7);
      const Vector b = fixture.cls->sample_member(7);
      CHECK((a - b).norm() == 0.0);
    }
  }
  SUBCASE("sampled members are members") {
    Rng rng(3);
    for (const auto& fixture : test_support::all_kind_fixtures()) {
      if (!fixture.samplable) continue;
      CAPTURE(fixture.name);
      for (int t = 0; t < 50; ++t)
        CHECK(fixture.cls->violation(fixture.cls->sample_member_with(rng)) <=
              kDefaultTol);
    }
  }
  SUBCASE("unbounded classes refuse to sample") {
    CHECK_THROWS_AS(make_halfspace(4)->sample_member(1), UnboundedClass);
    CHECK_THROWS_AS(make_whole_space(4)->sample_member(1), UnboundedClass);
  }
}

TEST_CASE("sampler mean matches the grid-quadrature centroid") {
  // Uniformity check on the monotone cube at n = 3.
  const auto cls = make_isotonic(3, 0.0, 1.0);
  const int draws = 10000;
  Rng rng(41);
  Vector mean = Vector::Zero(3);
  std::vector<std::vector<double>> coords(3);
  for (int t = 0; t < draws; ++t) {
    const Vector v = cls->sample_member_with(rng);
    mean += v;
    for (int k = 0; k < 3; ++k) coords[std::size_t(k)].push_back(v[k]);
  }
  mean /= double(draws);
  const Vector centroid = oracles::monotone_cube_centroid_grid(200);
  for (int k = 0; k < 3; ++k) {
    const double se = standard_error(coords[std::size_t(k)]);
    CHECK(std::abs(mean[k] - centroid[k]) <= 3.0 * se);
  }
}

TEST_CASE("restrict_to_ball") {
  SUBCASE("inactive constraint leaves projections unchanged") {
    const auto box = make_box(4, 0.0, 1.0);
    const auto restricted = restrict_to_ball(box, Vector::Zero(4), 10.0);
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
      const Vector y = 2.0 * rng.gaussian_vector(4);
      CHECK((restricted->project(y) - box->project(y)).norm() <= 1e-8);
    }
  }
  SUBCASE("radius zero is the singleton") {
    const auto box = make_box(3, 0.0, 1.0);
    Vector c(3);
    c << 0.5, 0.5, 0.5;
    const auto singleton = restrict_to_ball(box, c, 0.0);
    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
      const Vector y = 3.0 * rng.gaussian_vector(3);
      CHECK((singleton->project(y) - c).norm() <= 1e-7);
    }
  }
  SUBCASE("nested balls project to the inner one") {
    const auto ball = make_ball(Vector::Zero(2), 1.0);
    const auto inner = restrict_to_ball(ball, Vector::Zero(2), 0.5);
    Vector y(2);
    y << 3, 4;
    const Vector p = inner->project(y);
    CHECK(p[0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.4).epsilon(1e-6));
  }
}

TEST_CASE("population distance") {
  PopulationSampler sampler;
  const DesignSet design = DesignSet::grid_1d(8);

  SUBCASE("identical members have distance zero") {
    const auto cls = make_lipschitz(design, 1.0, 1.0);
    const Vector v = cls->sample_member(3);
    const auto d = population_distance(sampler, {cls, v}, {cls, v}, 100, 1);
    CHECK(d.dist == doctest::Approx(0.0));
  }
  SUBCASE("constants have exact gap at any m") {
    const auto cls = make_constants(8, -2.0, 2.0);
    const Vector f = Vector::Constant(8, 0.75);
    const Vector g = Vector::Constant(8, -0.5);
    for (Eigen::Index m : {1, 7, 100}) {
      const auto d = population_distance(sampler, {cls, f}, {cls, g}, m, 9);
      CHECK(d.dist == doctest::Approx(1.25));
    }
  }
  SUBCASE("matches a high-m oracle within 3 combined SEs") {
    const auto cls = make_lipschitz(design, 1.0, 1.0);
    const Vector f = cls->sample_member(21);
    const Vector g = cls->sample_member(22);
    const auto est = population_distance(sampler, {cls, f}, {cls, g}, 100000, 2);
    const auto oracle =
        population_distance(sampler, {cls, f}, {cls, g}, 2000000, 3);
    const double se = std::hypot(est.se_sq, oracle.se_sq);
    CHECK(std::abs(est.dist_sq - oracle.dist_sq) <= 3.0 * se);
  }
  SUBCASE("fixed-design-only kinds refuse evaluation") {
    const auto cls = make_box(8, 0.0, 1.0);
    const Vector v = cls->sample_member(1);
    CHECK_THROWS_AS(
        population_distance(sampler, {cls, v}, {cls, v}, 10, 1),
        EvaluationUnavailable);
  }
}

TEST_CASE("population evaluation is consistent at the design points") {
  // Evaluating a member back at its own design must reproduce its values for
  // the interpolating kinds.
  const DesignSet design = DesignSet::grid_1d(12);
  const std::vector<std::pair<std::string, ClassPtr>> kinds = {
      {"lipschitz", make_lipschitz(design, 1.0, 1.0)},
      {"convex-regression", make_convex_regression(design, -1.0, 1.0)},
      {"isotonic", make_isotonic(design, -1.0, 1.0)},
      {"polynomial", make_polynomial(design, 3)},
      {"constants", make_constants(12, -1.0, 1.0)}};
  for (const auto& [name, cls] : kinds) {
    CAPTURE(name);
    const Vector v = cls->sample_member(17);
    const Vector back = cls->evaluate_batch(v, design.points);
    CHECK((back - v).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("lipschitz evaluation stays lipschitz off the design") {
  const DesignSet design = DesignSet::grid_1d(10);
  const auto cls = make_lipschitz(design, 1.0, 1.0);
  const Vector v = cls->sample_member(4);
  PopulationSampler sampler;
  const Matrix pts = sampler.sample_points(200, 8);
  const Vector vals = cls->evaluate_batch(v, pts);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j) {
      const double d = std::abs(pts(i, 0) - pts(j, 0));
      CHECK(std::abs(vals[i] - vals[j]) <= d + 1e-9);
    }
}
