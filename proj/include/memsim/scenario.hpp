#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memsim/fit.hpp"
#include "memsim/keyvalue.hpp"

namespace memsim {

// A scalar result of a scenario, stored in SI units.
struct Metric {
  std::string name;
  double value{0.0};
  std::string unit;  // "", "Hz", "s", "m", "dB", ...
};

struct ScenarioOutput {
  std::string data_csv;
  FitResult fit;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
};

// Target for a metric, written in a config as `expect.<metric>=...`:
//   <target> +- <tolerance>     absolute tolerance
//   <target> +- <percent>%      relative tolerance
//   <lo>..<hi>                  closed range
struct Expectation {
  double lo{0.0};
  double hi{0.0};
  std::string text;

  static Expectation parse(const std::string& text);
  bool met(double value) const { return value >= lo && value <= hi; }
};

struct ScenarioEnv {
  // Directory holding the scenario's config; relative paths in the config
  // resolve against it.
  std::filesystem::path config_dir;

  std::filesystem::path resolve(const std::string& path) const;
};

using ScenarioFn = std::function<ScenarioOutput(const Config&, const ScenarioEnv&)>;

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::string anchor;
  ScenarioFn run;
  // Used when no <name>.conf exists in the scenario directory.
  std::optional<Config> defaults;
};

class ScenarioRegistry {
 public:
  // Throws ConfigError on a duplicate name.
  void add(ScenarioInfo info);
  const ScenarioInfo* find(const std::string& name) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return scenarios_.size(); }

  // Alphabetised "name  description  [anchor]" lines.
  void list(std::ostream& out) const;

  static ScenarioRegistry builtin();

 private:
  std::map<std::string, ScenarioInfo> scenarios_;
};

void register_builtin_scenarios(ScenarioRegistry& registry);

enum ExitCode : int { exit_pass = 0, exit_target_miss = 1, exit_usage = 2 };

struct RunOptions {
  std::filesystem::path scenario_dir;
  std::filesystem::path out_root;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Runs one scenario and writes <out_root>/<name>/{data.csv,fit.txt,
// summary.txt}. Reports to `log`; returns an ExitCode.
int run_scenario(const ScenarioRegistry& registry, const std::string& name,
                 const RunOptions& options, std::ostream& log);

// Runs every scenario whose config carries expectations.
int check_scenarios(const ScenarioRegistry& registry, const RunOptions& options,
                    std::ostream& log);

// "113.6kHz"-style rendering with 4 significant digits.
std::string format_with_unit(double value, const std::string& unit);

}  // namespace memsim
