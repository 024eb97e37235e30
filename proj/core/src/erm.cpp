#include "ermlab/erm.hpp"

#include <cmath>

#include "ermlab/errors.hpp"
#include "ermlab/rng.hpp"

namespace ermlab {

double NoiseModel::gamma2() const {
  switch (kind) {
    case Kind::GaussianIsotropic:
      return kInf;
    case Kind::Rademacher:
      return sigma;
    case Kind::UniformBounded:
      return sigma * std::sqrt(3.0);
  }
  return kInf;
}

std::string NoiseModel::kind_name() const {
  switch (kind) {
    case Kind::GaussianIsotropic:
      return "gaussian";
    case Kind::Rademacher:
      return "rademacher";
    case Kind::UniformBounded:
      return "uniform";
  }
  return "?";
}

Vector generate_noise(const NoiseModel& model, Eigen::Index n,
                      std::uint64_t seed) {
  if (n < 1) throw ConfigInvalid("n", "needs n >= 1");
  Rng rng(seed);
  Vector xi(n);
  switch (model.kind) {
    case NoiseModel::Kind::GaussianIsotropic:
      for (Eigen::Index i = 0; i < n; ++i) xi[i] = model.sigma * rng.gaussian();
      break;
    case NoiseModel::Kind::Rademacher:
      for (Eigen::Index i = 0; i < n; ++i)
        xi[i] = model.sigma * rng.rademacher();
      break;
    case NoiseModel::Kind::UniformBounded: {
      const double a = model.sigma * std::sqrt(3.0);  // unit variance scale
      for (Eigen::Index i = 0; i < n; ++i) xi[i] = rng.uniform(-a, a);
      break;
    }
  }
  return xi;
}

double empirical_loss(const Vector& y, const Vector& candidate) {
  if (y.size() != candidate.size())
    throw DimensionMismatch(std::size_t(y.size()), std::size_t(candidate.size()));
  return sq_norm_n(y - candidate);
}

ErmSolution solve_erm(const FunctionClass& cls, const Vector& fstar,
                      const Vector& noise, const SolveOptions& opts) {
  if (fstar.size() != cls.n())
    throw DimensionMismatch(std::size_t(cls.n()), std::size_t(fstar.size()));
  if (noise.size() != cls.n())
    throw DimensionMismatch(std::size_t(cls.n()), std::size_t(noise.size()));

  ErmSolution sol;
  sol.y = fstar + noise;
  sol.fhat = cls.project(sol.y, opts.tol);
  sol.loss = empirical_loss(sol.y, sol.fhat);
  sol.shifted_loss = sol.loss - sq_norm_n(noise);
  sol.tol = opts.tol;

  // Variational-inequality certificate over projected probe points; a
  // projection of any point is a member, so this works for unbounded
  // classes too.
  sol.kkt_gap = 0.0;
  if (opts.certify_probes > 0) {
    Rng rng(derive_seed(opts.probe_seed, 0xCE27));
    const Vector residual = sol.y - sol.fhat;
    const double scale = std::max(1.0, std::sqrt(sol.loss));
    for (int k = 0; k < opts.certify_probes; ++k) {
      const Vector probe =
          cls.project(sol.y + scale * rng.gaussian_vector(cls.n()), opts.tol);
      sol.kkt_gap = std::max(sol.kkt_gap, dot_n(probe - sol.fhat, residual));
    }
  }
  return sol;
}

bool in_O_delta(const FunctionClass& cls, const ErmSolution& solution,
                const Vector& candidate, double delta, double tol) {
  if (candidate.size() != cls.n())
    throw DimensionMismatch(std::size_t(cls.n()), std::size_t(candidate.size()));
  if (delta < 0.0) throw ConfigInvalid("delta", "must be >= 0");
  const double v = cls.violation(candidate);
  if (v > tol) throw NotAMember(v);
  return empirical_loss(solution.y, candidate) <= solution.loss + delta;
}

OGeometryCheck o_delta_geometric_check(const ErmSolution& solution,
                                       const Vector& candidate, double delta,
                                       double tol) {
  OGeometryCheck out;
  out.lhs = sq_norm_n(candidate - solution.fhat);
  out.rhs = delta;
  out.holds = out.lhs <= out.rhs + 10.0 * tol;
  return out;
}

double noise_correlation(const Vector& f, const Vector& g,
                         const Vector& noise) {
  if (f.size() != g.size())
    throw DimensionMismatch(std::size_t(f.size()), std::size_t(g.size()));
  if (f.size() != noise.size())
    throw DimensionMismatch(std::size_t(f.size()), std::size_t(noise.size()));
  return dot_n(f - g, noise);
}

}  // namespace ermlab
