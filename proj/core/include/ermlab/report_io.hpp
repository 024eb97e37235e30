#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ermlab/counterexamples.hpp"
#include "ermlab/decomposition.hpp"
#include "ermlab/geometry.hpp"
#include "ermlab/ratefit.hpp"
#include "ermlab/stability.hpp"

namespace ermlab {

nlohmann::json to_json(const DecompositionReport& r);
nlohmann::json to_json(const RateFit& r);
nlohmann::json to_json(const JaggedSummary& s, bool include_replicates = false);
nlohmann::json to_json(const FixedPointResult& r);
nlohmann::json to_json(const FiniteFieldReport& r);
nlohmann::json to_json(const GeometryReport& r);
DecompositionReport decomposition_from_json(const nlohmann::json& j);

/// Atomically writes text (write-then-rename); throws IoFailure with the
/// path in the message.
void write_text_atomic(const std::string& path, const std::string& text);

/// Serializes a JSON report with full numeric precision.
void write_json_report(const nlohmann::json& j, const std::string& path);

/// CSV with a fixed header; numbers at %.17g.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

/// The pinned rate-scan table schema.
inline const char* kRateScanCsvHeader =
    "n,risk,variance,bias_sq,cond_var,var_cond_mean,se_risk,se_variance,"
    "se_bias_sq,se_cond_var,se_var_cond_mean";

void write_rate_scan_csv(const std::string& path,
                         const std::vector<RateScanPoint>& scan);

std::string format_double(double v);

}  // namespace ermlab
