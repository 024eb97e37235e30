#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace ermlab {

/// Deterministic random source. All randomness in the lab flows through this
/// wrapper so that results are reproducible bit-for-bit per seed, independent
/// of the standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (no cached spare, for stream stability).
  double gaussian() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  /// +1 or -1 with equal probability.
  double rademacher() { return (engine_() & 1u) ? 1.0 : -1.0; }

  std::uint64_t next_u64() { return engine_(); }

  /// Integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) %
           n;
  }

  Eigen::VectorXd gaussian_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  /// Uniform direction on the Euclidean unit sphere in R^n.
  Eigen::VectorXd unit_direction(Eigen::Index n) {
    Eigen::VectorXd v = gaussian_vector(n);
    double nrm = v.norm();
    while (nrm < 1e-12) {
      v = gaussian_vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

private:
  std::mt19937_64 engine_;
};

/// Derives independent-looking streams from a base seed (SplitMix64 mix), so
/// that replicate r of experiment component c gets its own generator.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1) +
                    0xbf58476d1ce4e5b9ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ermlab
