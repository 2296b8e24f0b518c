// memory-sim: runs the registered storage scenarios.
//
//   memory-sim list
//   memory-sim run <name> [--set key=value]... [--out dir] [--scenarios dir]
//   memory-sim check [--out dir] [--scenarios dir]
//
// Exit status: 0 all targets met, 1 a target missed, 2 usage or input error.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "memsim/scenario.hpp"

namespace {

std::filesystem::path default_out() {
  if (const char* env = std::getenv("MEMORY_SIM_OUT"); env && *env) return env;
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-earth optical memory scenario runner"};
  app.require_subcommand(1);

  std::string scenario_dir = MEMSIM_DEFAULT_SCENARIO_DIR;
  std::string out_dir;
  std::string name;
  std::vector<std::string> sets;

  auto* list = app.add_subcommand("list", "List registered scenarios");
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("name", name, "Scenario name")->required();
  run->add_option("--set", sets, "Override a config key (key=value)");
  auto* check = app.add_subcommand("check", "Run every scenario that has targets");
  for (auto* sub : {run, check}) {
    sub->add_option("--out", out_dir, "Output root (default $MEMORY_SIM_OUT or ./out)");
    sub->add_option("--scenarios", scenario_dir, "Directory of scenario configs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return memsim::exit_usage;
  }

  const auto registry = memsim::ScenarioRegistry::builtin();
  if (*list) {
    registry.list(std::cout);
    return memsim::exit_pass;
  }

  memsim::RunOptions options;
  options.scenario_dir = scenario_dir;
  options.out_root = out_dir.empty() ? default_out() : std::filesystem::path(out_dir);
  try {
    for (const auto& s : sets) options.overrides.push_back(memsim::split_assignment(s));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return memsim::exit_usage;
  }

  if (*run) return memsim::run_scenario(registry, name, options, std::cout);
  return memsim::check_scenarios(registry, options, std::cout);
}
