#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ermlab/classes.hpp"
#include "ermlab/erm.hpp"
#include "ermlab/stability.hpp"

namespace ermlab {

/// Config-level description of a function class, instantiable at any design.
struct ClassSpec {
  std::string kind = "constants";
  Eigen::Index n = 32;
  double lo = -1.0, hi = 1.0;
  int degree = 1;
  double radius = 1.0;
  double center_value = 0.0;
  double lipschitz_constant = 1.0;
  double gamma1 = 1.0;
  Eigen::Index halfspace_coord = 0;
  std::optional<double> restrict_radius;
  double restrict_center_value = 0.0;

  ClassPtr realize(const DesignSet& design) const;
  ClassFamily family() const;
  void validate() const;
};

struct DesignSpec {
  std::string type = "grid";  // grid | uniform01 | gaussian
  Eigen::Index d = 1;

  bool fixed() const { return type == "grid"; }
  DesignSet build(Eigen::Index n, std::uint64_t seed) const;
  PopulationSampler sampler() const;
};

struct NoiseSpec {
  std::string kind = "gaussian";  // gaussian | rademacher | uniform
  double sigma = 1.0;

  NoiseModel model() const;
};

struct FstarSpec {
  std::string type = "zero";  // zero | constant | linear | values
  double c0 = 0.0;
  double c1 = 0.0;
  std::vector<double> values;

  FstarRule rule() const;
};

struct ReplicateSpec {
  int R = 2000;
  int R_X = 200;
  int R_xi = 100;
  Eigen::Index m = 4096;
};

struct GeometrySpec {
  std::size_t pool_size = 512;
  std::vector<double> eps_grid;  // empty: geometric grid from diameter
  std::size_t pair_count = 2000;
  std::size_t design_replicates = 0;  // 0: max(n, 32)
  double balancing_c = 1.0;
};

struct StabilitySpec {
  StabilityConfig constants;
  int R_outer = 200;
  int R_inner = 32;
  int R = 100;       // rho_O replicates
  double delta = 0.04;
};

struct FixedPointSpec {
  int R_inner = 1000;
  int max_iter = 50;
  double tol_fp = 1e-2;
};

struct CounterexampleSpec {
  std::string demo = "finite-field";  // finite-field | halfspace
  int q = 5;
  int n = 2;
  std::string rule = "trust-span";  // trust-span | distrust-span
  std::vector<double> delta_grid = {0.01, 0.04, 0.16};
  int R = 200;
};

/// One experiment: everything needed to reproduce a run byte-for-byte.
struct ExperimentConfig {
  int schema_version = 1;
  std::string experiment;  // required
  ClassSpec class_spec;    // required except for counterexample
  DesignSpec design;
  NoiseSpec noise;
  FstarSpec fstar;
  ReplicateSpec replicates;
  std::vector<Eigen::Index> n_grid = {64, 128, 256, 512};
  std::vector<double> target;  // project experiment
  GeometrySpec geometry;
  StabilitySpec stability;
  FixedPointSpec fixed_point;
  CounterexampleSpec counterexample;
  std::uint64_t seed = 1;
  double tol = kDefaultTol;
  std::size_t workers = 1;
  bool deterministic = false;
  std::string out = "out";
  std::string format = "json";  // json | csv

  void validate() const;
  /// FNV-1a over the canonical (key-sorted) serialization; field order in
  /// the file does not matter.
  std::string hash() const;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
};

}  // namespace ermlab
