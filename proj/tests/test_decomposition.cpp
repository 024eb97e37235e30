#include <doctest.h>

#include <cmath>

#include "ermlab/decomposition.hpp"
#include "ermlab/errors.hpp"
#include "ermlab/ratefit.hpp"
#include "ermlab/rng.hpp"

using namespace ermlab;

namespace {

/// A projectable class whose solver fails on demand: exercises the
/// abort-counting path.
class FlakyClass final : public FunctionClass {
public:
  FlakyClass(Eigen::Index n, int fail_every)
      : FunctionClass(n, "Flaky"), fail_every_(fail_every) {}
  double violation(const Vector&) const override { return 0.0; }
  double empirical_diameter() const override { return 1.0; }

protected:
  Vector project_impl(const Vector& t, double) const override {
    ++calls_;
    if (fail_every_ > 0 && calls_ % fail_every_ == 0)
      throw NonConvergence(1, 1.0);
    return t;
  }
  Vector sample_impl(Rng& rng) const override {
    return rng.gaussian_vector(n_);
  }

private:
  int fail_every_;
  mutable int calls_ = 0;
};

}  // namespace

TEST_CASE("fixed design closed forms") {
  NoiseModel m;
  SUBCASE("whole space: variance 1, bias 0") {
    const auto cls = make_whole_space(32);
    const auto rep =
        fixed_design_decomposition(*cls, Vector::Zero(32), m, 2000, 3);
    CHECK(std::abs(rep.variance - 1.0) <= 3.0 * rep.se_variance);
    CHECK(rep.bias_sq <= 3.0 * rep.se_bias_sq + 1e-3);
    CHECK(std::abs(rep.risk - 1.0) <= 3.0 * rep.se_risk);
  }
  SUBCASE("constants: variance 1/n, bias 0") {
    const Eigen::Index n = 16;
    const auto cls = make_constants(n, -kInf, kInf);
    const auto rep = fixed_design_decomposition(
        *cls, Vector::Constant(n, 0.25), m, 4000, 5);
    CHECK(std::abs(rep.variance - 1.0 / double(n)) <= 3.0 * rep.se_variance);
    CHECK(rep.bias_sq <= 3.0 * rep.se_bias_sq + 1e-4);
  }
  SUBCASE("zero noise: risk is the squared distance, variance 0") {
    NoiseModel quiet;
    quiet.sigma = 0.0;
    const auto cls = make_box(4, 0.0, 1.0);
    const Vector fstar = Vector::Constant(4, 2.0);  // distance 1 per coord
    const auto rep = fixed_design_decomposition(*cls, fstar, quiet, 100, 1);
    CHECK(rep.variance == 0.0);
    CHECK(rep.risk == doctest::Approx(1.0));
    CHECK(rep.bias_sq == doctest::Approx(1.0));
  }
}

TEST_CASE("risk identity holds on every emitted report") {
  NoiseModel m;
  const Eigen::Index n = 24;
  const std::vector<std::pair<std::string, ClassPtr>> kinds = {
      {"constants", make_constants(n, -1.0, 1.0)},
      {"isotonic", make_isotonic(n, -1.0, 1.0)},
      {"ball", make_ball(Vector::Zero(n), 0.5 * std::sqrt(double(n)))}};
  for (const auto& [name, cls] : kinds) {
    CAPTURE(name);
    const auto rep =
        fixed_design_decomposition(*cls, cls->sample_member(4), m, 2000, 11);
    const double se = std::sqrt(rep.se_risk * rep.se_risk +
                                rep.se_variance * rep.se_variance +
                                rep.se_bias_sq * rep.se_bias_sq);
    CHECK(std::abs(rep.risk - rep.variance - rep.bias_sq) <= 3.0 * se + 1e-12);
    CHECK(rep.variance >= 0.0);
    CHECK(rep.bias_sq >= 0.0);
    CHECK(risk_floor_ok(rep));
  }
}

TEST_CASE("random design decomposition on constants") {
  NoiseModel m;
  PopulationSampler sampler;
  const Eigen::Index n = 16;
  const ClassFamily family = [](const DesignSet& d) {
    return make_constants(d.n(), -kInf, kInf);
  };
  FstarRule zero;  // f* = 0
  const auto rep = random_design_decomposition(family, n, sampler, zero, m,
                                               120, 60, 512, 13);

  SUBCASE("conditional variance matches 1/n") {
    CHECK(std::abs(rep.cond_var - 1.0 / double(n)) <= 3.0 * rep.se_cond_var);
  }
  SUBCASE("variance of the conditional mean vanishes by symmetry") {
    CHECK(rep.var_cond_mean <= 3.0 * rep.se_var_cond_mean + 1e-4);
  }
  SUBCASE("total variance identity") {
    const double lhs = rep.variance;
    const double rhs = rep.cond_var + rep.var_cond_mean;
    const double se = std::sqrt(rep.se_variance * rep.se_variance +
                                rep.se_cond_var * rep.se_cond_var +
                                rep.se_var_cond_mean * rep.se_var_cond_mean);
    CHECK(std::abs(lhs - rhs) <= 3.0 * se + 1e-6);
  }
  SUBCASE("risk identity in the population norm") {
    const double se = std::sqrt(rep.se_risk * rep.se_risk +
                                rep.se_variance * rep.se_variance +
                                rep.se_bias_sq * rep.se_bias_sq);
    CHECK(std::abs(rep.risk - rep.variance - rep.bias_sq) <= 3.0 * se + 1e-6);
  }
  SUBCASE("report metadata") {
    CHECK(rep.norm_used == "population(512)");
    CHECK(rep.replicates_outer == 120);
    CHECK(rep.replicates_inner == 60);
  }
}

TEST_CASE("random design on an interpolating kind (isotonic)") {
  NoiseModel m;
  PopulationSampler sampler;
  const ClassFamily family = [](const DesignSet& d) {
    return make_isotonic(d, -1.0, 1.0);
  };
  FstarRule zero;
  const auto rep = random_design_decomposition(family, 24, sampler, zero, m,
                                               80, 40, 256, 17);
  const double se = std::sqrt(rep.se_variance * rep.se_variance +
                              rep.se_cond_var * rep.se_cond_var +
                              rep.se_var_cond_mean * rep.se_var_cond_mean);
  CHECK(std::abs(rep.variance - rep.cond_var - rep.var_cond_mean) <=
        3.0 * se + 1e-6);
  CHECK(rep.variance >= 0.0);
  CHECK(rep.cond_var >= 0.0);
  CHECK(rep.var_cond_mean >= 0.0);
}

TEST_CASE("random design refuses fixed-design-only kinds") {
  NoiseModel m;
  PopulationSampler sampler;
  const ClassFamily family = [](const DesignSet& d) {
    return make_box(d.n(), 0.0, 1.0);
  };
  FstarRule zero;
  CHECK_THROWS_AS(random_design_decomposition(family, 8, sampler, zero, m, 4,
                                              4, 32, 1),
                  EvaluationUnavailable);
}

TEST_CASE("rate scan on constants recovers the 1/n law") {
  NoiseModel m;
  const std::vector<Eigen::Index> grid = {64, 128, 256, 512, 1024, 2048, 4096};
  const auto scan = rate_scan(
      [](Eigen::Index n) { return make_constants(n, -kInf, kInf); },
      [](Eigen::Index n) { return Vector::Zero(n); }, m, grid, 800, 23);
  REQUIRE(scan.size() == grid.size());
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : scan) pairs.emplace_back(double(p.n), p.report.variance);
  const RateFit fit = fit_exponent(pairs);
  CHECK(fit.exponent >= -1.1);
  CHECK(fit.exponent <= -0.9);
}

TEST_CASE("isotonic variance scaling: adaptive at flat truth, minimax at a strict trend") {
  // At f* = 0 the isotonic LSE adapts (statistical dimension H_n, variance
  // roughly log(n)/n, log-log slope near -0.87); the -2/3 balancing rate
  // shows at a strictly increasing truth.
  NoiseModel m;
  const std::vector<Eigen::Index> grid = {64, 128, 256, 512, 1024};
  const auto flat = rate_scan(
      [](Eigen::Index n) { return make_isotonic(n, -1.0, 1.0); },
      [](Eigen::Index n) { return Vector::Zero(n); }, m, grid, 500, 29);
  std::vector<std::pair<double, double>> flat_pairs;
  for (const auto& p : flat)
    flat_pairs.emplace_back(double(p.n), p.report.variance);
  CHECK(fit_exponent(flat_pairs).exponent < -0.8);

  const auto trend = rate_scan(
      [](Eigen::Index n) { return make_isotonic(n, -1.0, 1.0); },
      [](Eigen::Index n) {
        Vector f(n);
        for (Eigen::Index i = 0; i < n; ++i)
          f[i] = 2.0 * double(i) / double(n - 1) - 1.0;
        return f;
      },
      m, grid, 500, 31);
  std::vector<std::pair<double, double>> trend_pairs;
  for (const auto& p : trend)
    trend_pairs.emplace_back(double(p.n), p.report.variance);
  const double e = fit_exponent(trend_pairs).exponent;
  CHECK(e >= -0.80);
  CHECK(e <= -0.55);
}

TEST_CASE("zero-noise scan has identically zero variance") {
  NoiseModel quiet;
  quiet.sigma = 0.0;
  const auto scan = rate_scan(
      [](Eigen::Index n) { return make_box(n, 0.0, 1.0); },
      [](Eigen::Index n) { return Vector::Constant(n, 0.5); }, quiet,
      {8, 16, 32, 64}, 50, 1);
  for (const auto& p : scan) CHECK(p.report.variance == 0.0);
}

TEST_CASE("rate scan validates its grid") {
  NoiseModel m;
  const auto cls_fn = [](Eigen::Index n) { return make_box(n, 0.0, 1.0); };
  const auto fs_fn = [](Eigen::Index n) { return Vector::Constant(n, 0.5); };
  CHECK_THROWS_AS(rate_scan(cls_fn, fs_fn, m, {8, 16, 32}, 10, 1),
                  ConfigInvalid);
  CHECK_THROWS_AS(rate_scan(cls_fn, fs_fn, m, {8, 16, 16, 32}, 10, 1),
                  ConfigInvalid);
}

TEST_CASE("seed reproducibility of reports") {
  NoiseModel m;
  const auto cls = make_isotonic(12, -1.0, 1.0);
  const auto a = fixed_design_decomposition(*cls, Vector::Zero(12), m, 200, 7);
  const auto b = fixed_design_decomposition(*cls, Vector::Zero(12), m, 200, 7);
  CHECK(a.risk == b.risk);
  CHECK(a.variance == b.variance);
  CHECK(a.bias_sq == b.bias_sq);
  CHECK(a.se_risk == b.se_risk);
}

TEST_CASE("abort accounting and the failure threshold") {
  NoiseModel m;
  SUBCASE("occasional failures are counted, run succeeds") {
    // ~0.5% failures out of 2000.
    FlakyClass flaky(4, 250);
    const auto rep =
        fixed_design_decomposition(flaky, Vector::Zero(4), m, 2000, 3);
    CHECK(rep.aborted > 0);
    CHECK(rep.aborted * 100 <= 2000);
    CHECK(rep.replicates_outer == 2000 - int(rep.aborted));
  }
  SUBCASE("more than 1% failures aborts the run") {
    FlakyClass flaky(4, 20);  // 5% failures
    CHECK_THROWS_AS(
        fixed_design_decomposition(flaky, Vector::Zero(4), m, 2000, 3),
        SolverFailureThreshold);
  }
}

TEST_CASE("halfspace reports carry the diameter-unbounded flag") {
  NoiseModel m;
  const auto cls = make_halfspace(8);
  const auto rep =
      fixed_design_decomposition(*cls, Vector::Zero(8), m, 100, 5);
  CHECK(rep.diameter_unbounded);
  const auto bounded = make_box(8, 0.0, 1.0);
  const auto rep2 =
      fixed_design_decomposition(*bounded, Vector::Zero(8), m, 100, 5);
  CHECK_FALSE(rep2.diameter_unbounded);
}
