// Batch experiment runner: configures domains, sequences and maps from a
// JSON file, executes one named experiment, and writes machine-readable
// reports plus optional plot-ready point clouds.
//
// Exit codes: 0 pass, 1 assertion failure, 2 inconclusive present,
// 3 config error.

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "horokit/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"horokit: horosphere geometry experiments on model domains"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory for report.json / points.csv");
  run->add_option("--seed", seed, "override the config RNG seed");
  run->add_flag("--verbose", verbose, "print one line per report item");

  auto* schema = app.add_subcommand("schema", "print the report schema version");

  CLI11_PARSE(app, argc, argv);

  if (schema->parsed()) {
    std::printf("%s\n", horokit::report_schema_version().c_str());
    return 0;
  }
  return horokit::run_experiment_file(config_path, out_dir, seed, verbose);
}
