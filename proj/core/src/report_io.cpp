#include "ermlab/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ermlab/errors.hpp"

namespace ermlab {

using nlohmann::json;

json to_json(const DecompositionReport& r) {
  return json{{"risk", r.risk},
              {"variance", r.variance},
              {"bias_sq", r.bias_sq},
              {"cond_var", r.cond_var},
              {"var_cond_mean", r.var_cond_mean},
              {"se_risk", r.se_risk},
              {"se_variance", r.se_variance},
              {"se_bias_sq", r.se_bias_sq},
              {"se_cond_var", r.se_cond_var},
              {"se_var_cond_mean", r.se_var_cond_mean},
              {"replicates", {r.replicates_outer, r.replicates_inner}},
              {"norm_used", r.norm_used},
              {"n", r.n},
              {"aborted", r.aborted},
              {"diameter_unbounded", r.diameter_unbounded},
              {"tol", r.tol},
              {"seed", r.seed}};
}

DecompositionReport decomposition_from_json(const json& j) {
  DecompositionReport r;
  j.at("risk").get_to(r.risk);
  j.at("variance").get_to(r.variance);
  j.at("bias_sq").get_to(r.bias_sq);
  j.at("cond_var").get_to(r.cond_var);
  j.at("var_cond_mean").get_to(r.var_cond_mean);
  j.at("se_risk").get_to(r.se_risk);
  j.at("se_variance").get_to(r.se_variance);
  j.at("se_bias_sq").get_to(r.se_bias_sq);
  j.at("se_cond_var").get_to(r.se_cond_var);
  j.at("se_var_cond_mean").get_to(r.se_var_cond_mean);
  r.replicates_outer = j.at("replicates")[0].get<int>();
  r.replicates_inner = j.at("replicates")[1].get<int>();
  j.at("norm_used").get_to(r.norm_used);
  r.n = j.at("n").get<Eigen::Index>();
  j.at("aborted").get_to(r.aborted);
  j.at("diameter_unbounded").get_to(r.diameter_unbounded);
  j.at("tol").get_to(r.tol);
  j.at("seed").get_to(r.seed);
  return r;
}

json to_json(const RateFit& r) {
  return json{{"exponent", r.exponent},
              {"intercept", r.intercept},
              {"stderr", r.stderr_exponent},
              {"r_squared", r.r_squared},
              {"n_range", {r.n_range.first, r.n_range.second}}};
}

json to_json(const JaggedSummary& s, bool include_replicates) {
  json j{{"distance_median", s.distance_median},
         {"distance_q90", s.distance_q90},
         {"excess_median", s.excess_median},
         {"excess_q90", s.excess_q90},
         {"exceed_fraction", s.exceed_fraction},
         {"ks_symmetry", s.ks_symmetry},
         {"replicates", s.distance.size()}};
  if (include_replicates) {
    j["distance"] = s.distance;
    j["excess"] = s.excess;
  }
  return j;
}

json to_json(const FixedPointResult& r) {
  return json{{"fstar", std::vector<double>(r.fstar.data(),
                                            r.fstar.data() + r.fstar.size())},
              {"residual", r.residual},
              {"iterations", r.iterations},
              {"bias_sq", r.report.bias_sq},
              {"variance", r.report.variance},
              {"success", r.success},
              {"report", to_json(r.report)}};
}

json to_json(const FiniteFieldReport& r) {
  json rows = json::array();
  for (const auto& row : r.risk_table)
    rows.push_back(json{{"fstar_id", row.fstar_id},
                        {"distribution_id", row.distribution_id},
                        {"risk", row.risk},
                        {"risk_ambient", row.risk_ambient}});
  return json{{"q", r.q},
              {"n", r.n},
              {"hyperplane_count", r.hyperplane_count},
              {"p_h0", r.p_h0},
              {"p_h1", r.p_h1},
              {"p0", r.p0},
              {"p1", r.p1},
              {"p0_fubini", r.p0_fubini},
              {"p1_fubini", r.p1_fubini},
              {"fubini_exact", r.fubini_exact},
              {"du_lower_bound", r.du_lower_bound},
              {"exact_enumeration", r.exact_enumeration},
              {"risk_table", rows}};
}

json to_json(const GeometryReport& r) {
  return json{{"eps_star", r.eps_star},
              {"eps_U", r.eps_u},
              {"eps_V", r.eps_v},
              {"I_L", r.i_lower},
              {"I_U", r.i_upper},
              {"confidence", r.confidence},
              {"estimate_is_lower_bound", r.estimate_is_lower_bound}};
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoFailure(path, "cannot create directories: " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure(path, "cannot open temporary file");
    out << text;
    out.flush();
    if (!out) throw IoFailure(path, "write failed");
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoFailure(path, "rename failed: " + ec.message());
}

void write_json_report(const json& j, const std::string& path) {
  write_text_atomic(path, j.dump(2) + "\n");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::string text = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ",";
      text += format_double(row[i]);
    }
    text += "\n";
  }
  write_text_atomic(path, text);
}

void write_rate_scan_csv(const std::string& path,
                         const std::vector<RateScanPoint>& scan) {
  std::vector<std::vector<double>> rows;
  rows.reserve(scan.size());
  for (const auto& p : scan) {
    const auto& r = p.report;
    rows.push_back({double(p.n), r.risk, r.variance, r.bias_sq, r.cond_var,
                    r.var_cond_mean, r.se_risk, r.se_variance, r.se_bias_sq,
                    r.se_cond_var, r.se_var_cond_mean});
  }
  write_csv(path, kRateScanCsvHeader, rows);
}

}  // namespace ermlab
