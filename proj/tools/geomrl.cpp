#include <CLI11.hpp>
#include <iostream>

#include "geomrl/harness/commands.hpp"

int main(int argc, char** argv) {
  using namespace geomrl::cli;

  CLI::App app{"Policy search with manifold-valued actions"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opts;
  std::string output;
  app.add_option("--jobs,-j", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output,-o", output, "Output directory (overrides the config)");

  std::string run_config;
  auto* run = app.add_subcommand("run", "Train one adapter on every seed");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();

  std::string compare_config;
  auto* compare = app.add_subcommand("compare", "Train every applicable adapter on the same seeds");
  compare->add_option("config", compare_config, "Experiment config (JSON)")->required();

  std::string filter;
  auto* selftest = app.add_subcommand("selftest", "Check manifold and optimizer properties");
  selftest->add_option("--filter", filter, "Only run properties whose name contains this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (app.count("--output")) opts.output = output;

  if (*run) return cmd_run(run_config, opts, std::cout, std::cerr);
  if (*compare) return cmd_compare(compare_config, opts, std::cout, std::cerr);
  return cmd_selftest(filter, std::cout, std::cerr);
}
