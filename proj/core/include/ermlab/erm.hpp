#pragma once

#include <cstdint>
#include <string>

#include "ermlab/classes.hpp"
#include "ermlab/norms.hpp"

namespace ermlab {

/// Distribution of the noise vector. All kinds are isotropic with
/// per-coordinate variance sigma^2; only the Gaussian kind carries a
/// certified dimension-free Lipschitz concentration constant, so invariants
/// that need concentration are only asserted when lcp_certified is true.
struct NoiseModel {
  enum class Kind { GaussianIsotropic, Rademacher, UniformBounded };

  Kind kind = Kind::GaussianIsotropic;
  double sigma = 1.0;

  /// Almost-sure bound on |xi_i| (infinite for the Gaussian kind).
  double gamma2() const;
  /// Lipschitz-concentration parameter; meaningful when lcp_certified().
  double c_L() const { return 0.5 / (sigma * sigma); }
  bool lcp_certified() const { return kind == Kind::GaussianIsotropic; }
  bool symmetric() const { return true; }

  std::string kind_name() const;
};

/// One noise draw, deterministic per (model, n, seed).
Vector generate_noise(const NoiseModel& model, Eigen::Index n,
                      std::uint64_t seed);

/// The solved least-squares problem at one draw.
struct ErmSolution {
  Vector fhat;          // projection of y onto F_n
  Vector y;             // observation vector fstar + noise
  double loss = 0.0;    // empirical squared loss, mean over coordinates
  double shifted_loss = 0.0;  // loss - ||noise||_n^2
  double kkt_gap = 0.0;       // max probe value of <u - fhat, y - fhat>_n
  std::uint64_t seed = 0;     // noise seed (0 when noise supplied directly)
  double tol = kDefaultTol;
};

struct SolveOptions {
  double tol = kDefaultTol;
  /// Number of sampled members certifying the variational inequality; 0
  /// skips certification (hot Monte Carlo loops).
  int certify_probes = 64;
  std::uint64_t probe_seed = 0x5eedu;
};

/// ERM at a fixed design: fhat = project(fstar + noise). fstar need not be a
/// member (misspecification allowed).
ErmSolution solve_erm(const FunctionClass& cls, const Vector& fstar,
                      const Vector& noise, const SolveOptions& opts = {});

double empirical_loss(const Vector& y, const Vector& candidate);

/// delta-approximate-minimizer test, inclusive at the boundary. Throws
/// NotAMember when the candidate is not in F_n up to tol.
bool in_O_delta(const FunctionClass& cls, const ErmSolution& solution,
                const Vector& candidate, double delta,
                double tol = kDefaultTol);

struct OGeometryCheck {
  double lhs = 0.0;  // ||candidate - fhat||_n^2
  double rhs = 0.0;  // delta
  bool holds = false;
};

/// The convex-geometry containment every O_delta member must satisfy.
OGeometryCheck o_delta_geometric_check(const ErmSolution& solution,
                                       const Vector& candidate, double delta,
                                       double tol = kDefaultTol);

/// Empirical noise-function correlation <f - g, xi>_n.
double noise_correlation(const Vector& f, const Vector& g, const Vector& noise);

}  // namespace ermlab
