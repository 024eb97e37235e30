#include <doctest.h>

#include <cmath>

#include "ermlab/erm.hpp"
#include "ermlab/errors.hpp"
#include "ermlab/rng.hpp"
#include "ermlab/stats.hpp"
#include "test_support.hpp"

using namespace ermlab;

TEST_CASE("noise generation examples") {
  SUBCASE("rademacher support") {
    NoiseModel m;
    m.kind = NoiseModel::Kind::Rademacher;
    const Vector xi = generate_noise(m, 4, 3);
    for (Eigen::Index i = 0; i < 4; ++i)
      CHECK(std::abs(std::abs(xi[i]) - 1.0) < 1e-15);
  }
  SUBCASE("gaussian variance over 1e6 draws") {
    NoiseModel m;
    std::vector<double> draws;
    draws.reserve(1000000);
    Rng rng(12345);
    for (int i = 0; i < 1000000; ++i) draws.push_back(rng.gaussian());
    const double var = sample_variance(draws);
    CHECK(var > 0.99);
    CHECK(var < 1.01);
    CHECK(std::abs(mean(draws)) < 5e-3);
  }
  SUBCASE("uniform bounded kind has unit variance and the stated bound") {
    NoiseModel m;
    m.kind = NoiseModel::Kind::UniformBounded;
    std::vector<double> draws;
    const Vector xi = generate_noise(m, 100000, 7);
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      draws.push_back(xi[i]);
      CHECK(std::abs(xi[i]) <= m.gamma2());
    }
    CHECK(sample_variance(draws) == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("determinism per seed") {
    NoiseModel m;
    const Vector a = generate_noise(m, 64, 99);
    const Vector b = generate_noise(m, 64, 99);
    CHECK((a - b).norm() == 0.0);
    const Vector c = generate_noise(m, 64, 100);
    CHECK((a - c).norm() > 0.0);
  }
}

TEST_CASE("solve_erm examples") {
  SUBCASE("constants class mean") {
    const auto cls = make_constants(2, -kInf, kInf);
    Vector fstar = Vector::Zero(2), noise(2);
    noise << 0, 2;
    const ErmSolution sol = solve_erm(*cls, fstar, noise);
    CHECK(sol.fhat[0] == doctest::Approx(1.0));
    CHECK(sol.fhat[1] == doctest::Approx(1.0));
    CHECK(sol.loss == doctest::Approx(1.0));
    CHECK(sol.kkt_gap <= 10.0 * kDefaultTol);
  }
  SUBCASE("noiseless realizable is exact") {
    const auto cls = make_box(5, 0.0, 1.0);
    const Vector fstar = cls->sample_member(2);
    const ErmSolution sol = solve_erm(*cls, fstar, Vector::Zero(5));
    CHECK((sol.fhat - fstar).norm() <= 1e-9);
    CHECK(sol.loss <= 1e-18);
  }
  SUBCASE("halfspace clamp") {
    const auto cls = make_halfspace(2);
    Vector fstar = Vector::Zero(2), noise(2);
    noise << -1, 2;
    const ErmSolution sol = solve_erm(*cls, fstar, noise);
    CHECK(sol.fhat[0] == doctest::Approx(0.0));
    CHECK(sol.fhat[1] == doctest::Approx(2.0));
    CHECK(sol.loss == doctest::Approx(0.5));
  }
  SUBCASE("misspecified targets are allowed") {
    const auto cls = make_box(3, 0.0, 1.0);
    const Vector fstar = Vector::Constant(3, 5.0);  // not a member
    const ErmSolution sol = solve_erm(*cls, fstar, Vector::Zero(3));
    CHECK(cls->violation(sol.fhat) <= kDefaultTol);
    CHECK(sol.loss == doctest::Approx(16.0));
  }
}

TEST_CASE("in_O_delta") {
  const auto cls = make_constants(2, -kInf, kInf);
  Vector fstar = Vector::Zero(2), noise(2);
  noise << 0, 2;
  const ErmSolution sol = solve_erm(*cls, fstar, noise);

  SUBCASE("the minimizer is always included") {
    CHECK(in_O_delta(*cls, sol, sol.fhat, 0.0));
    CHECK(in_O_delta(*cls, sol, sol.fhat, 1.0));
  }
  SUBCASE("loss arithmetic at the contract example") {
    const Vector candidate = Vector::Constant(2, 1.1);
    CHECK(in_O_delta(*cls, sol, candidate, 0.02));
    CHECK_FALSE(in_O_delta(*cls, sol, candidate, 0.005));
  }
  SUBCASE("boundary is inclusive") {
    const Vector candidate = Vector::Constant(2, 1.1);
    const double delta = empirical_loss(sol.y, candidate) - sol.loss;
    CHECK(in_O_delta(*cls, sol, candidate, delta));
  }
  SUBCASE("non-members are rejected") {
    Vector bad(2);
    bad << 0.0, 1.0;  // not constant
    CHECK_THROWS_AS(in_O_delta(*cls, sol, bad, 1.0), NotAMember);
  }
}

TEST_CASE("o_delta_geometric_check") {
  SUBCASE("the minimizer trivially passes") {
    const auto cls = make_constants(2, -kInf, kInf);
    Vector noise(2);
    noise << 0, 2;
    const ErmSolution sol = solve_erm(*cls, Vector::Zero(2), noise);
    const auto chk = o_delta_geometric_check(sol, sol.fhat, 0.5);
    CHECK(chk.lhs == doctest::Approx(0.0));
    CHECK(chk.holds);
  }
  SUBCASE("contract example: lhs 0.01 under delta 0.02") {
    const auto cls = make_constants(2, -kInf, kInf);
    Vector noise(2);
    noise << 0, 2;
    const ErmSolution sol = solve_erm(*cls, Vector::Zero(2), noise);
    const Vector candidate = Vector::Constant(2, 1.1);
    const auto chk = o_delta_geometric_check(sol, candidate, 0.02);
    CHECK(chk.lhs == doctest::Approx(0.01));
    CHECK(chk.holds);
  }
  SUBCASE("random O_delta members across kinds") {
    Rng rng(23);
    for (const auto& fixture : test_support::all_kind_fixtures()) {
      if (!fixture.samplable) continue;
      CAPTURE(fixture.name);
      const auto& cls = *fixture.cls;
      NoiseModel m;
      for (int t = 0; t < 10; ++t) {
        const Vector fstar = cls.sample_member_with(rng);
        const Vector xi = generate_noise(m, cls.n(), rng.next_u64());
        SolveOptions opts;
        opts.certify_probes = 0;
        const ErmSolution sol = solve_erm(cls, fstar, xi, opts);
        for (int k = 0; k < 5; ++k) {
          const Vector u = cls.sample_member_with(rng);
          const double delta = empirical_loss(sol.y, u) - sol.loss;
          REQUIRE(delta >= -10.0 * kDefaultTol);
          const auto chk =
              o_delta_geometric_check(sol, u, std::max(delta, 0.0));
          CHECK(chk.holds);
        }
      }
    }
  }
}

TEST_CASE("noise_correlation") {
  SUBCASE("identical members have zero correlation") {
    const Vector f = Vector::Constant(3, 0.5);
    const Vector xi = Vector::Ones(3);
    CHECK(noise_correlation(f, f, xi) == 0.0);
  }
  SUBCASE("self correlation is the squared norm") {
    Vector xi(3);
    xi << 1, -2, 0.5;
    const Vector g = Vector::Zero(3);
    CHECK(noise_correlation(xi, g, xi) == doctest::Approx(sq_norm_n(xi)));
  }
  SUBCASE("hand-computed inner product") {
    Vector f(2), g(2), xi(2);
    f << 1, -2;
    g << 0, 0;
    xi << -1, 0;
    CHECK(noise_correlation(f, g, xi) == doctest::Approx(-0.5));
  }
}

TEST_CASE("shifted-loss decomposition identity") {
  // shifted_loss(f) = -2 <f - fstar, xi>_n + ||f - fstar||_n^2.
  Rng rng(29);
  const auto cls = make_box(12, 0.0, 1.0);
  NoiseModel m;
  for (int t = 0; t < 200; ++t) {
    const Vector fstar = rng.gaussian_vector(12);
    const Vector xi = generate_noise(m, 12, rng.next_u64());
    const Vector f = cls->sample_member_with(rng);
    const Vector y = fstar + xi;
    const double shifted = empirical_loss(y, f) - sq_norm_n(xi);
    const double expected =
        -2.0 * noise_correlation(f, fstar, xi) + sq_norm_n(f - fstar);
    CHECK(shifted == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("O_delta monotone inclusion") {
  Rng rng(31);
  const auto cls = make_isotonic(10, -1.0, 1.0);
  NoiseModel m;
  const Vector fstar = cls->sample_member(5);
  const ErmSolution sol = solve_erm(*cls, fstar, generate_noise(m, 10, 17));
  for (int t = 0; t < 200; ++t) {
    const Vector u = cls->sample_member_with(rng);
    if (in_O_delta(*cls, sol, u, 0.05)) CHECK(in_O_delta(*cls, sol, u, 0.2));
  }
}

TEST_CASE("noise-contraction of the solution map") {
  Rng rng(37);
  NoiseModel m;
  for (const auto& fixture : test_support::all_kind_fixtures()) {
    CAPTURE(fixture.name);
    const auto& cls = *fixture.cls;
    SolveOptions opts;
    opts.certify_probes = 0;
    for (int t = 0; t < 30; ++t) {
      const Vector fstar = Vector::Zero(cls.n());
      const Vector xi1 = generate_noise(m, cls.n(), rng.next_u64());
      const Vector xi2 = generate_noise(m, cls.n(), rng.next_u64());
      const Vector a = solve_erm(cls, fstar, xi1, opts).fhat;
      const Vector b = solve_erm(cls, fstar, xi2, opts).fhat;
      CHECK(norm_n(a - b) <= norm_n(xi1 - xi2) + 10.0 * kDefaultTol);
    }
  }
}

TEST_CASE("erm solution serialization fields") {
  const auto cls = make_constants(4, -1.0, 1.0);
  NoiseModel m;
  const Vector xi = generate_noise(m, 4, 3);
  ErmSolution sol = solve_erm(*cls, Vector::Zero(4), xi);
  sol.seed = 3;
  CHECK(sol.shifted_loss == doctest::Approx(sol.loss - sq_norm_n(xi)));
  CHECK(sol.tol == kDefaultTol);
}
