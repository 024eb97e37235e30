#include "ermlab/runner.hpp"

#include <chrono>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ermlab/counterexamples.hpp"
#include "ermlab/decomposition.hpp"
#include "ermlab/errors.hpp"
#include "ermlab/geometry.hpp"
#include "ermlab/ratefit.hpp"
#include "ermlab/report_io.hpp"
#include "ermlab/stats.hpp"
#include "ermlab/stability.hpp"
#include "ermlab/version.hpp"

namespace ermlab {

using nlohmann::json;

namespace {

json envelope(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["tool_version"] = kVersion;
  j["config_hash"] = cfg.hash();
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["experiment"] = cfg.experiment;
  j["deterministic"] = cfg.deterministic;
  if (!cfg.deterministic) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["timestamp_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  }
  return j;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& stem,
                     const std::string& ext) {
  return cfg.out + "/" + stem + "." + ext;
}

std::vector<double> grid_default(double diameter) {
  std::vector<double> grid;
  double eps = std::max(diameter, 1e-3) * 0.6;
  for (int k = 0; k < 14; ++k) {
    grid.push_back(eps);
    eps *= 0.72;
  }
  return grid;
}

double eps_star_for(const ExperimentConfig& cfg, const FunctionClass& cls,
                    EntropyCurve* curve_out = nullptr) {
  const double diam =
      cls.bounded() ? cls.empirical_diameter() : 2.0;
  const auto grid = cfg.geometry.eps_grid.empty()
                        ? grid_default(diam)
                        : cfg.geometry.eps_grid;
  const EntropyCurve curve = empirical_entropy_curve(
      cls, grid, cfg.geometry.pool_size, derive_seed(cfg.seed, 0xE5));
  if (curve_out) *curve_out = curve;
  return solve_balancing(curve, double(cls.n()), cfg.geometry.balancing_c);
}

RunResult run_project(const ExperimentConfig& cfg) {
  const DesignSet design =
      cfg.design.build(cfg.class_spec.n, derive_seed(cfg.seed, 0xD));
  const ClassPtr cls = cfg.class_spec.family()(design);
  if (Eigen::Index(cfg.target.size()) != cls->n())
    throw ConfigInvalid("target", "dimension does not match class n");
  const Vector target = Eigen::Map<const Vector>(
      cfg.target.data(), Eigen::Index(cfg.target.size()));

  SolveOptions opts;
  opts.tol = cfg.tol;
  opts.probe_seed = cfg.seed;
  const ErmSolution sol = solve_erm(*cls, target, Vector::Zero(cls->n()), opts);

  json j = envelope(cfg);
  j["report"] = {
      {"projection", std::vector<double>(sol.fhat.data(),
                                         sol.fhat.data() + sol.fhat.size())},
      {"violation", cls->violation(sol.fhat)},
      {"kkt_gap", sol.kkt_gap},
      {"distance", norm_n(sol.fhat - target)}};
  const std::string path = out_path(cfg, "project", "json");
  write_json_report(j, path);
  return {0, {path}};
}

RunResult run_decompose(const ExperimentConfig& cfg) {
  DecompositionOptions opts;
  opts.tol = cfg.tol;
  opts.workers = cfg.workers;
  DecompositionReport rep;
  if (cfg.design.fixed()) {
    const DesignSet design = cfg.design.build(cfg.class_spec.n, cfg.seed);
    const ClassPtr cls = cfg.class_spec.family()(design);
    rep = fixed_design_decomposition(*cls, cfg.fstar.rule().at_design(design),
                                     cfg.noise.model(), cfg.replicates.R,
                                     cfg.seed, opts);
  } else {
    rep = random_design_decomposition(
        cfg.class_spec.family(), cfg.class_spec.n, cfg.design.sampler(),
        cfg.fstar.rule(), cfg.noise.model(), cfg.replicates.R_X,
        cfg.replicates.R_xi, cfg.replicates.m, cfg.seed, opts);
  }
  json j = envelope(cfg);
  j["report"] = to_json(rep);
  const std::string path = out_path(cfg, "decompose", "json");
  write_json_report(j, path);
  return {0, {path}};
}

RunResult run_rate_scan(const ExperimentConfig& cfg) {
  DecompositionOptions opts;
  opts.tol = cfg.tol;
  opts.workers = cfg.workers;
  const ClassSpec spec = cfg.class_spec;
  const DesignSpec dspec = cfg.design;
  const std::uint64_t seed = cfg.seed;
  const FstarRule fstar = cfg.fstar.rule();

  const auto scan = rate_scan(
      [&](Eigen::Index n) {
        ClassSpec s = spec;
        s.n = n;
        return s.family()(dspec.build(n, derive_seed(seed, 0xA, n)));
      },
      [&](Eigen::Index n) {
        return fstar.at_design(dspec.build(n, derive_seed(seed, 0xA, n)));
      },
      cfg.noise.model(), cfg.n_grid, cfg.replicates.R, cfg.seed, opts);

  json points = json::array();
  std::vector<std::pair<double, double>> var_pairs, risk_pairs;
  bool variance_positive = true;
  for (const auto& p : scan) {
    json pj = to_json(p.report);
    points.push_back(pj);
    risk_pairs.emplace_back(double(p.n), p.report.risk);
    var_pairs.emplace_back(double(p.n), p.report.variance);
    if (!(p.report.variance > 0.0)) variance_positive = false;
  }

  json j = envelope(cfg);
  j["report"]["points"] = points;
  if (variance_positive)
    j["report"]["variance_fit"] = to_json(fit_exponent(var_pairs));
  j["report"]["risk_fit"] = to_json(fit_exponent(risk_pairs));

  const std::string jpath = out_path(cfg, "rate_scan", "json");
  const std::string cpath = out_path(cfg, "rate_scan", "csv");
  write_json_report(j, jpath);
  write_rate_scan_csv(cpath, scan);
  return {0, {jpath, cpath}};
}

RunResult run_geometry(const ExperimentConfig& cfg) {
  const DesignSet design =
      cfg.design.build(cfg.class_spec.n, derive_seed(cfg.seed, 0xD));
  const ClassPtr cls = cfg.class_spec.family()(design);

  EntropyCurve curve = EntropyCurve::zero();
  GeometryReport rep;
  rep.eps_star = eps_star_for(cfg, *cls, &curve);
  rep.confidence = 1.0 - 1.0 / double(cls->n());

  if (!cfg.design.fixed() && cls->population_evaluable()) {
    const std::size_t dreps = cfg.geometry.design_replicates
                                  ? cfg.geometry.design_replicates
                                  : std::size_t(std::max<Eigen::Index>(
                                        cls->n(), 32));
    const auto iso = isometry_remainders(
        cfg.class_spec.family(), cfg.design.sampler(), cls->n(),
        cfg.geometry.pair_count, dreps, cfg.replicates.m,
        derive_seed(cfg.seed, 0x15), cfg.geometry.pool_size, cfg.workers);
    rep.i_lower = iso.i_lower;
    rep.i_upper = iso.i_upper;
  }
  const auto eu = solve_epsilon_u(curve, double(cls->n()), rep.i_upper,
                                  rep.eps_star, rep.i_lower,
                                  cfg.geometry.balancing_c);
  rep.eps_u = eu.eps_u;
  rep.eps_v = eu.eps_v;

  json j = envelope(cfg);
  j["report"] = to_json(rep);
  j["report"]["curve"] = curve.description();

  const std::string jpath = out_path(cfg, "geometry", "json");
  const std::string cpath = out_path(cfg, "entropy_curve", "csv");
  write_json_report(j, jpath);
  std::vector<std::vector<double>> rows;
  for (const auto& [eps, logn] : curve.table()) rows.push_back({eps, logn});
  write_csv(cpath, "epsilon,log_count", rows);
  return {0, {jpath, cpath}};
}

RunResult run_stability(const ExperimentConfig& cfg) {
  const DesignSet design =
      cfg.design.build(cfg.class_spec.n, derive_seed(cfg.seed, 0xD));
  const ClassPtr cls = cfg.class_spec.family()(design);
  const Vector fstar = cfg.fstar.rule().at_design(design);
  const NoiseModel model = cfg.noise.model();

  StabilityReport rep;
  rep.config = cfg.stability.constants;
  rep.diameter_unbounded = cls->diameter_unbounded();
  rep.eps_star = cls->bounded() ? eps_star_for(cfg, *cls) : 0.0;

  SolveOptions sopts;
  sopts.tol = cfg.tol;
  sopts.certify_probes = 0;

  // O_delta diameter at the configured delta, averaged over noise draws.
  std::vector<double> diams;
  const int reps = std::max(8, cfg.stability.R_outer / 8);
  for (int r = 0; r < reps; ++r) {
    const Vector xi = generate_noise(model, cls->n(), derive_seed(cfg.seed, 0x0D, r));
    const ErmSolution sol = solve_erm(*cls, fstar, xi, sopts);
    diams.push_back(o_delta_diameter(*cls, sol, cfg.stability.delta,
                                     cfg.stability.constants.probe_directions,
                                     derive_seed(cfg.seed, 0x0E, r), cfg.tol)
                        .diameter);
  }
  const auto dms = mean_se(diams);
  rep.o_delta_diameter = dms.value;
  rep.o_delta_diameter_se = dms.se;

  if (rep.eps_star > 0.0) {
    rep.rho_s = estimate_rho_s(*cls, fstar, model, cfg.stability.constants,
                               rep.eps_star, cfg.stability.R_outer,
                               cfg.stability.R_inner,
                               derive_seed(cfg.seed, 0x0F), nullptr, 0,
                               cfg.tol);
    if (!cfg.design.fixed() && cls->population_evaluable() &&
        cfg.fstar.rule().population_evaluable()) {
      rep.rho_o = estimate_rho_o(
          cfg.class_spec.family(), cls->n(), cfg.design.sampler(),
          cfg.fstar.rule(), model, cfg.stability.constants, rep.eps_star,
          cfg.stability.R, cfg.replicates.m, derive_seed(cfg.seed, 0x10),
          cfg.tol);
    }
  }

  json j = envelope(cfg);
  j["report"] = {{"o_delta_diameter", rep.o_delta_diameter},
                 {"o_delta_diameter_se", rep.o_delta_diameter_se},
                 {"delta", cfg.stability.delta},
                 {"rho_S", rep.rho_s},
                 {"rho_O", rep.rho_o},
                 {"eps_star", rep.eps_star},
                 {"diameter_unbounded", rep.diameter_unbounded},
                 {"constants",
                  {{"M", rep.config.M},
                   {"M_prime", rep.config.M_prime},
                   {"c_I", rep.config.c_I},
                   {"c_2", rep.config.c_2}}}};
  const std::string path = out_path(cfg, "stability", "json");
  write_json_report(j, path);
  return {0, {path}};
}

RunResult run_jagged(const ExperimentConfig& cfg) {
  const DesignSet design =
      cfg.design.build(cfg.class_spec.n, derive_seed(cfg.seed, 0xD));
  const ClassPtr cls = cfg.class_spec.family()(design);
  const Vector fstar = cfg.fstar.rule().at_design(design);
  const double eps_star = cls->bounded() ? eps_star_for(cfg, *cls) : 0.0;

  const JaggedSummary s =
      jagged_probe(*cls, fstar, cfg.noise.model(), cfg.replicates.R, cfg.seed,
                   eps_star, 1.0, cfg.tol, cfg.workers);

  json j = envelope(cfg);
  j["report"] = to_json(s);
  j["report"]["eps_star"] = eps_star;

  std::vector<std::string> outputs;
  const std::string jpath = out_path(cfg, "jagged", "json");
  write_json_report(j, jpath);
  outputs.push_back(jpath);
  if (cfg.format == "csv") {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.distance.size(); ++i)
      rows.push_back({double(i), s.distance[i], s.excess[i], s.norm_plus[i],
                      s.norm_minus[i]});
    const std::string cpath = out_path(cfg, "jagged", "csv");
    write_csv(cpath, "replicate,distance,excess,norm_plus,norm_minus", rows);
    outputs.push_back(cpath);
  }
  return {0, outputs};
}

RunResult run_fixed_point(const ExperimentConfig& cfg) {
  const DesignSet design =
      cfg.design.build(cfg.class_spec.n, derive_seed(cfg.seed, 0xD));
  const ClassPtr cls = cfg.class_spec.family()(design);

  json j = envelope(cfg);
  int exit_code = 0;
  try {
    const FixedPointResult res = fixed_point_search(
        *cls, cfg.noise.model(), cfg.fixed_point.R_inner,
        cfg.fixed_point.max_iter, cfg.fixed_point.tol_fp, cfg.seed,
        std::nullopt, cfg.replicates.R, cfg.tol, cfg.workers);
    j["report"] = to_json(res);
    j["report"]["converged"] = true;
  } catch (const NonConvergence& e) {
    j["report"] = {{"converged", false},
                   {"iterations", e.iterations},
                   {"residual", e.residual}};
    exit_code = 3;
  }
  const std::string path = out_path(cfg, "fixed_point", "json");
  write_json_report(j, path);
  return {exit_code, {path}};
}

RunResult run_counterexample(const ExperimentConfig& cfg) {
  json j = envelope(cfg);
  std::vector<std::string> outputs;
  if (cfg.counterexample.demo == "finite-field") {
    const FiniteFieldModel model(cfg.counterexample.q, cfg.counterexample.n);
    EstimatorRule rule;
    if (cfg.counterexample.rule == "trust-span")
      rule = trust_span_rule();
    else if (cfg.counterexample.rule == "distrust-span")
      rule = distrust_span_rule(model);
    else
      throw ConfigInvalid("counterexample.rule",
                          "unknown rule '" + cfg.counterexample.rule + "'");
    FiniteFieldOptions opts;
    opts.seed = cfg.seed;
    const FiniteFieldReport rep =
        finite_field_demo(cfg.counterexample.q, cfg.counterexample.n, rule,
                          opts);
    j["report"] = to_json(rep);
    const std::string jpath = out_path(cfg, "counterexample", "json");
    write_json_report(j, jpath);
    outputs.push_back(jpath);

    // CSV risk table: fstar_id, distribution_id, risk.
    std::string text = "fstar_id,distribution_id,risk\n";
    for (const auto& row : rep.risk_table)
      text += row.fstar_id + "," + row.distribution_id + "," +
              format_double(row.risk) + "\n";
    const std::string cpath = out_path(cfg, "counterexample_risk", "csv");
    write_text_atomic(cpath, text);
    outputs.push_back(cpath);
  } else if (cfg.counterexample.demo == "halfspace") {
    const auto rows = halfspace_stability_demo(
        cfg.class_spec.n, cfg.counterexample.delta_grid, cfg.noise.model(),
        cfg.counterexample.R, cfg.seed,
        cfg.stability.constants.probe_directions, cfg.tol);
    json table = json::array();
    std::vector<std::vector<double>> csv_rows;
    for (const auto& r : rows) {
      table.push_back(json{{"delta", r.delta},
                           {"diameter", r.diameter},
                           {"diameter_se", r.diameter_se},
                           {"predicted", r.predicted},
                           {"rel_deviation", r.rel_deviation}});
      csv_rows.push_back({r.delta, r.diameter, r.predicted});
    }
    j["report"] = {{"rows", table}, {"diameter_unbounded", true}};
    const std::string jpath = out_path(cfg, "counterexample", "json");
    write_json_report(j, jpath);
    outputs.push_back(jpath);
    const std::string cpath = out_path(cfg, "counterexample_halfspace", "csv");
    write_csv(cpath, "delta,diameter,predicted", csv_rows);
    outputs.push_back(cpath);
  } else {
    throw ConfigInvalid("counterexample.demo",
                        "unknown demo '" + cfg.counterexample.demo + "'");
  }
  return {0, outputs};
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  try {
    if (cfg.experiment == "project") return run_project(cfg);
    if (cfg.experiment == "decompose") return run_decompose(cfg);
    if (cfg.experiment == "rate-scan") return run_rate_scan(cfg);
    if (cfg.experiment == "geometry") return run_geometry(cfg);
    if (cfg.experiment == "stability") return run_stability(cfg);
    if (cfg.experiment == "jagged") return run_jagged(cfg);
    if (cfg.experiment == "fixed-point") return run_fixed_point(cfg);
    if (cfg.experiment == "counterexample") return run_counterexample(cfg);
  } catch (const SolverFailureThreshold& e) {
    json j = envelope(cfg);
    j["error"] = {{"kind", "solver_failure_threshold"},
                  {"failed", e.failed},
                  {"total", e.total}};
    const std::string path = out_path(cfg, cfg.experiment + "_failed", "json");
    write_json_report(j, path);
    return {3, {path}};
  }
  throw ConfigInvalid("experiment", "unhandled experiment");
}

}  // namespace ermlab
