#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zmd/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Zero-moment-direction hover controller: platform validation and batch simulation"};
  app.require_subcommand(1);

  std::string platform_file;
  auto* validate = app.add_subcommand("validate", "Check the allocation rank condition and print the analysis");
  validate->add_option("platform", platform_file, "Platform JSON file")->required();

  zmd::RunOptions run_opts;
  std::string out_path;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Simulate one or more scenarios");
  run->add_option("scenarios", run_opts.scenario_files, "Scenario JSON file(s)")->required();
  auto* out_opt = run->add_option("--out", out_path, "Trace CSV path (single scenario)");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario RNG seed");
  run->add_option("--jobs", run_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : zmd::kExitBadInput;
  }

  if (validate->parsed()) {
    return zmd::cmd_validate(platform_file, std::cout, std::cerr);
  }
  if (*out_opt) run_opts.output = out_path;
  if (*seed_opt) run_opts.seed = seed;
  return zmd::cmd_run(run_opts, std::cout, std::cerr);
}
