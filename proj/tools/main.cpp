#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scenario.hpp"

int main(int argc, char** argv) {
  using namespace sigmoids::cli;

  CLI::App app{"Sigmoid forecasting toolkit: run bundled or custom scenarios"};
  app.require_subcommand(1);

  std::string scenario_dir = default_scenario_dir();
  app.add_option("--scenario-dir", scenario_dir, "Directory of bundled scenarios");

  RunOptions options;
  std::string target;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario file or a bundled scenario by name");
  run->add_option("scenario", target, "Scenario file path or bundled name")->required();
  run->add_option("--out", out_dir, "Output directory (default: the scenario's output or out/<name>)");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("-q,--quiet", options.quiet, "Do not print one line per artifact");

  auto* list = app.add_subcommand("list", "List bundled scenarios");

  CLI11_PARSE(app, argc, argv);

  options.scenario_dir = scenario_dir;
  options.out_dir = out_dir;
  options.seed = seed;
  if (*run) return run_scenario(target, options, std::cout, std::cerr);
  if (*list) return list_scenarios(scenario_dir, std::cout, std::cerr);
  return 1;
}
