#pragma once

#include <string>
#include <vector>

#include "ermlab/config.hpp"

namespace ermlab {

struct RunResult {
  int exit_code = 0;  // 0 ok, 3 solver-failure threshold
  std::vector<std::string> outputs;
};

/// Validates the config, runs the experiment, writes report files under
/// config.out. ConfigInvalid and IoFailure propagate to the caller (the CLI
/// maps them to exit codes 2 and 4); solver-failure thresholds and
/// fixed-point divergence are written into the report and returned as
/// exit code 3.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace ermlab
