// ermlab: simulation laboratory for least-squares ERM over convex classes.
//
// Subcommands mirror the experiment kinds; every run is driven by a JSON
// config file plus a few global overrides. Exit codes: 0 success, 2 config
// error, 3 solver failure threshold exceeded, 4 I/O error.

#include <CLI11.hpp>
#include <iostream>

#include "ermlab/errors.hpp"
#include "ermlab/runner.hpp"
#include "ermlab/version.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool deterministic = false;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

void add_common(CLI::App* cmd, GlobalArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", args.seed, "Override the config seed");
  cmd->add_option("--workers", args.workers, "Worker pool size");
  cmd->add_flag("--deterministic", args.deterministic,
                "Byte-identical reports (no timestamps)");
  cmd->add_option("--out", args.out, "Output directory");
  cmd->add_option("--format", args.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

int run(const std::string& experiment, const GlobalArgs& args) {
  ermlab::ExperimentConfig cfg = ermlab::ExperimentConfig::load(args.config_path);
  cfg.experiment = experiment;
  if (args.seed) cfg.seed = *args.seed;
  if (args.workers) cfg.workers = *args.workers;
  if (args.deterministic) cfg.deterministic = true;
  if (args.out) cfg.out = *args.out;
  if (args.format) cfg.format = *args.format;

  const ermlab::RunResult result = ermlab::run_experiment(cfg);
  for (const auto& path : result.outputs)
    std::cout << "wrote " << path << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ermlab: ERM-over-convex-classes simulation laboratory"};
  app.set_version_flag("--version", ermlab::kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {
      "project",    "decompose",   "rate-scan",     "geometry",
      "stability",  "jagged",      "fixed-point",   "counterexample"};

  std::map<std::string, GlobalArgs> args;
  for (const auto& kind : kinds) {
    auto* cmd = app.add_subcommand(kind, "Run the " + kind + " experiment");
    add_common(cmd, args[kind]);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string chosen = app.get_subcommands().front()->get_name();
  try {
    return run(chosen, args[chosen]);
  } catch (const ermlab::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ermlab::IoFailure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const ermlab::SolverFailureThreshold& e) {
    std::cerr << "solver failures: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
