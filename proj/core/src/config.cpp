#include "ermlab/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ermlab/errors.hpp"

namespace ermlab {

using nlohmann::json;

ClassPtr ClassSpec::realize(const DesignSet& design) const {
  const Eigen::Index nn = design.n();
  if (kind == "constants") return make_constants(nn, lo, hi);
  if (kind == "whole-space") return make_whole_space(nn);
  if (kind == "polynomial") return make_polynomial(design, degree);
  if (kind == "ball")
    return make_ball(Vector::Constant(nn, center_value), radius);
  if (kind == "box") return make_box(nn, lo, hi);
  if (kind == "halfspace") return make_halfspace(nn, halfspace_coord);
  if (kind == "isotonic") return make_isotonic(design, lo, hi);
  if (kind == "isotonic-index") return make_isotonic(nn, lo, hi);
  if (kind == "convex-regression") return make_convex_regression(design, lo, hi);
  if (kind == "lipschitz")
    return make_lipschitz(design, lipschitz_constant, gamma1);
  throw ConfigInvalid("class.kind", "unknown kind '" + kind + "'");
}

ClassFamily ClassSpec::family() const {
  ClassSpec spec = *this;
  return [spec](const DesignSet& design) {
    ClassPtr cls = spec.realize(design);
    if (spec.restrict_radius)
      cls = restrict_to_ball(
          cls, Vector::Constant(design.n(), spec.restrict_center_value),
          *spec.restrict_radius);
    return cls;
  };
}

void ClassSpec::validate() const {
  static const char* kinds[] = {
      "constants",        "whole-space", "polynomial",
      "ball",             "box",         "halfspace",
      "isotonic",         "isotonic-index", "convex-regression",
      "lipschitz"};
  bool found = false;
  for (const char* k : kinds)
    if (kind == k) found = true;
  if (!found) throw ConfigInvalid("class.kind", "unknown kind '" + kind + "'");
  if (n < 1) throw ConfigInvalid("class.n", "needs n >= 1");
  if (restrict_radius && *restrict_radius < 0.0)
    throw ConfigInvalid("class.restrict_radius", "must be >= 0");
}

DesignSet DesignSpec::build(Eigen::Index n, std::uint64_t seed) const {
  if (type == "grid") return DesignSet::grid_1d(n);
  return sampler().sample_design(n, seed);
}

PopulationSampler DesignSpec::sampler() const {
  PopulationSampler s;
  s.dim = d;
  if (type == "gaussian")
    s.dist = PopulationSampler::Dist::Gaussian;
  else
    s.dist = PopulationSampler::Dist::Uniform01;
  return s;
}

NoiseModel NoiseSpec::model() const {
  NoiseModel m;
  m.sigma = sigma;
  if (kind == "gaussian")
    m.kind = NoiseModel::Kind::GaussianIsotropic;
  else if (kind == "rademacher")
    m.kind = NoiseModel::Kind::Rademacher;
  else if (kind == "uniform")
    m.kind = NoiseModel::Kind::UniformBounded;
  else
    throw ConfigInvalid("noise.kind", "unknown kind '" + kind + "'");
  return m;
}

FstarRule FstarSpec::rule() const {
  FstarRule r;
  if (type == "zero") {
    r.kind = FstarRule::Kind::Zero;
  } else if (type == "constant") {
    r.kind = FstarRule::Kind::Constant;
    r.c0 = c0;
  } else if (type == "linear") {
    r.kind = FstarRule::Kind::Linear;
    r.c0 = c0;
    r.c1 = c1;
  } else if (type == "values") {
    r.kind = FstarRule::Kind::Values;
    r.values = Eigen::Map<const Vector>(values.data(),
                                        Eigen::Index(values.size()));
  } else {
    throw ConfigInvalid("fstar.type", "unknown type '" + type + "'");
  }
  return r;
}

void ExperimentConfig::validate() const {
  static const char* kinds[] = {"project",    "decompose",  "rate-scan",
                                "geometry",   "stability",  "jagged",
                                "fixed-point", "counterexample"};
  bool found = false;
  for (const char* k : kinds)
    if (experiment == k) found = true;
  if (!found)
    throw ConfigInvalid("experiment",
                        "unknown experiment '" + experiment + "'");
  if (experiment != "counterexample") class_spec.validate();
  if (replicates.R < 2) throw ConfigInvalid("replicates.R", "needs >= 2");
  if (replicates.R_X < 2) throw ConfigInvalid("replicates.R_X", "needs >= 2");
  if (replicates.R_xi < 2)
    throw ConfigInvalid("replicates.R_xi", "needs >= 2");
  if (replicates.m < 2) throw ConfigInvalid("replicates.m", "needs >= 2");
  if (!(tol > 0.0)) throw ConfigInvalid("tol", "must be positive");
  if (workers < 1) throw ConfigInvalid("workers", "needs >= 1");
  if (format != "json" && format != "csv")
    throw ConfigInvalid("format", "must be json or csv");
  if (noise.sigma < 0.0) throw ConfigInvalid("noise.sigma", "must be >= 0");
  if (experiment == "rate-scan") {
    if (n_grid.size() < 4)
      throw ConfigInvalid("n_grid", "needs at least 4 sizes");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
      if (n_grid[i] <= n_grid[i - 1])
        throw ConfigInvalid("n_grid", "must be strictly increasing");
  }
  if (experiment == "project" && target.empty())
    throw ConfigInvalid("target", "project needs a target vector");
}

// --- JSON (de)serialization --------------------------------------------------

namespace {

template <typename T>
void get_to_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

json to_json(const ClassSpec& c) {
  json j{{"kind", c.kind},
         {"n", c.n},
         {"lo", c.lo},
         {"hi", c.hi},
         {"degree", c.degree},
         {"radius", c.radius},
         {"center_value", c.center_value},
         {"lipschitz_constant", c.lipschitz_constant},
         {"gamma1", c.gamma1},
         {"halfspace_coord", c.halfspace_coord},
         {"restrict_center_value", c.restrict_center_value}};
  if (c.restrict_radius) j["restrict_radius"] = *c.restrict_radius;
  return j;
}

ClassSpec class_from_json(const json& j) {
  ClassSpec c;
  get_to_if(j, "kind", c.kind);
  if (j.contains("n")) c.n = j.at("n").get<Eigen::Index>();
  get_to_if(j, "lo", c.lo);
  get_to_if(j, "hi", c.hi);
  get_to_if(j, "degree", c.degree);
  get_to_if(j, "radius", c.radius);
  get_to_if(j, "center_value", c.center_value);
  get_to_if(j, "lipschitz_constant", c.lipschitz_constant);
  get_to_if(j, "gamma1", c.gamma1);
  if (j.contains("halfspace_coord"))
    c.halfspace_coord = j.at("halfspace_coord").get<Eigen::Index>();
  get_to_if(j, "restrict_center_value", c.restrict_center_value);
  if (j.contains("restrict_radius"))
    c.restrict_radius = j.at("restrict_radius").get<double>();
  return c;
}

}  // namespace

json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["experiment"] = experiment;
  j["class"] = ermlab::to_json(class_spec);
  j["design"] = {{"type", design.type}, {"d", design.d}};
  j["noise"] = {{"kind", noise.kind}, {"sigma", noise.sigma}};
  j["fstar"] = {{"type", fstar.type},
                {"c0", fstar.c0},
                {"c1", fstar.c1},
                {"values", fstar.values}};
  j["replicates"] = {{"R", replicates.R},
                     {"R_X", replicates.R_X},
                     {"R_xi", replicates.R_xi},
                     {"m", replicates.m}};
  j["n_grid"] = n_grid;
  j["target"] = target;
  j["geometry"] = {{"pool_size", geometry.pool_size},
                   {"eps_grid", geometry.eps_grid},
                   {"pair_count", geometry.pair_count},
                   {"design_replicates", geometry.design_replicates},
                   {"balancing_c", geometry.balancing_c}};
  j["stability"] = {{"M", stability.constants.M},
                    {"M_prime", stability.constants.M_prime},
                    {"c_I", stability.constants.c_I},
                    {"c_2", stability.constants.c_2},
                    {"probe_directions", stability.constants.probe_directions},
                    {"R_outer", stability.R_outer},
                    {"R_inner", stability.R_inner},
                    {"R", stability.R},
                    {"delta", stability.delta}};
  j["fixed_point"] = {{"R_inner", fixed_point.R_inner},
                      {"max_iter", fixed_point.max_iter},
                      {"tol_fp", fixed_point.tol_fp}};
  j["counterexample"] = {{"demo", counterexample.demo},
                         {"q", counterexample.q},
                         {"n", counterexample.n},
                         {"rule", counterexample.rule},
                         {"delta_grid", counterexample.delta_grid},
                         {"R", counterexample.R}};
  j["seed"] = seed;
  j["tol"] = tol;
  j["workers"] = workers;
  j["deterministic"] = deterministic;
  j["out"] = out;
  j["format"] = format;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  get_to_if(j, "schema_version", c.schema_version);
  if (!j.contains("experiment"))
    throw ConfigInvalid("experiment", "missing (no default)");
  j.at("experiment").get_to(c.experiment);
  if (j.contains("class")) c.class_spec = class_from_json(j.at("class"));
  else if (c.experiment != "counterexample")
    throw ConfigInvalid("class", "missing (no default)");
  if (j.contains("design")) {
    get_to_if(j.at("design"), "type", c.design.type);
    if (j.at("design").contains("d"))
      c.design.d = j.at("design").at("d").get<Eigen::Index>();
  }
  if (j.contains("noise")) {
    get_to_if(j.at("noise"), "kind", c.noise.kind);
    get_to_if(j.at("noise"), "sigma", c.noise.sigma);
  }
  if (j.contains("fstar")) {
    get_to_if(j.at("fstar"), "type", c.fstar.type);
    get_to_if(j.at("fstar"), "c0", c.fstar.c0);
    get_to_if(j.at("fstar"), "c1", c.fstar.c1);
    get_to_if(j.at("fstar"), "values", c.fstar.values);
  }
  if (j.contains("replicates")) {
    const auto& r = j.at("replicates");
    get_to_if(r, "R", c.replicates.R);
    get_to_if(r, "R_X", c.replicates.R_X);
    get_to_if(r, "R_xi", c.replicates.R_xi);
    if (r.contains("m")) c.replicates.m = r.at("m").get<Eigen::Index>();
  }
  if (j.contains("n_grid")) {
    c.n_grid.clear();
    for (const auto& v : j.at("n_grid"))
      c.n_grid.push_back(v.get<Eigen::Index>());
  }
  get_to_if(j, "target", c.target);
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    get_to_if(g, "pool_size", c.geometry.pool_size);
    get_to_if(g, "eps_grid", c.geometry.eps_grid);
    get_to_if(g, "pair_count", c.geometry.pair_count);
    get_to_if(g, "design_replicates", c.geometry.design_replicates);
    get_to_if(g, "balancing_c", c.geometry.balancing_c);
  }
  if (j.contains("stability")) {
    const auto& s = j.at("stability");
    get_to_if(s, "M", c.stability.constants.M);
    get_to_if(s, "M_prime", c.stability.constants.M_prime);
    get_to_if(s, "c_I", c.stability.constants.c_I);
    get_to_if(s, "c_2", c.stability.constants.c_2);
    get_to_if(s, "probe_directions", c.stability.constants.probe_directions);
    get_to_if(s, "R_outer", c.stability.R_outer);
    get_to_if(s, "R_inner", c.stability.R_inner);
    get_to_if(s, "R", c.stability.R);
    get_to_if(s, "delta", c.stability.delta);
  }
  if (j.contains("fixed_point")) {
    const auto& f = j.at("fixed_point");
    get_to_if(f, "R_inner", c.fixed_point.R_inner);
    get_to_if(f, "max_iter", c.fixed_point.max_iter);
    get_to_if(f, "tol_fp", c.fixed_point.tol_fp);
  }
  if (j.contains("counterexample")) {
    const auto& x = j.at("counterexample");
    get_to_if(x, "demo", c.counterexample.demo);
    get_to_if(x, "q", c.counterexample.q);
    get_to_if(x, "n", c.counterexample.n);
    get_to_if(x, "rule", c.counterexample.rule);
    get_to_if(x, "delta_grid", c.counterexample.delta_grid);
    get_to_if(x, "R", c.counterexample.R);
  }
  get_to_if(j, "seed", c.seed);
  get_to_if(j, "tol", c.tol);
  get_to_if(j, "workers", c.workers);
  get_to_if(j, "deterministic", c.deterministic);
  get_to_if(j, "out", c.out);
  get_to_if(j, "format", c.format);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure(path, "cannot open config");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigInvalid("<file>", std::string("JSON parse error: ") + e.what());
  }
  return from_json(j);
}

std::string ExperimentConfig::hash() const {
  // nlohmann::json orders object keys, so the dump is canonical.
  const std::string dump = to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)(h));
  return std::string(buf);
}

}  // namespace ermlab
