#include <iostream>

#include <CLI11.hpp>

#include "fockmarket_cli/run.hpp"

int main(int argc, char** argv) {
  using namespace fockmarket::cli;
  CLI::App app{"Configuration-driven runs of the Fock-space market models"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  RunOptions options;
  auto* run = app.add_subcommand("run", "run a scenario and write its outputs");
  run->add_option("config", config, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides [run] out)");
  run->add_flag("--plots", options.plots, "also render SVG plots of every CSV");
  run->add_option("--jobs", options.jobs, "worker threads for sweep runs")
      ->check(CLI::PositiveNumber);

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "re-run a scenario and diff against fixtures");
  verify->add_option("config", verify_config, "scenario config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*run) {
    if (!out_dir.empty()) options.out = out_dir;
    return run_command(config, options, std::cout, std::cerr);
  }
  return verify_command(verify_config, std::cout, std::cerr);
}
