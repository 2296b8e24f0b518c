#include "memsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "memsim/errors.hpp"
#include "memsim/format.hpp"

namespace memsim {

namespace {

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || text.find_first_not_of(" \t", used) != std::string::npos)
    throw ConfigError("expectation '" + context + "': '" + text + "' is not a number");
  return v;
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

constexpr const char* kExpectPrefix = "expect.";

std::map<std::string, Expectation> expectations(const Config& cfg) {
  std::map<std::string, Expectation> out;
  for (const auto& [key, value] : cfg.values())
    if (key.rfind(kExpectPrefix, 0) == 0)
      out.emplace(key.substr(std::char_traits<char>::length(kExpectPrefix)),
                  Expectation::parse(value));
  return out;
}

Config load_config(const ScenarioInfo& info, const std::filesystem::path& dir) {
  const auto path = dir / (info.name + ".conf");
  if (std::filesystem::exists(path)) return Config::load(path);
  if (info.defaults) return *info.defaults;
  throw ConfigError("no config for scenario '" + info.name + "' in " + dir.string());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace

Expectation Expectation::parse(const std::string& text) {
  Expectation e;
  e.text = strip(text);
  if (const auto dots = e.text.find(".."); dots != std::string::npos) {
    e.lo = parse_number(e.text.substr(0, dots), text);
    e.hi = parse_number(e.text.substr(dots + 2), text);
  } else if (const auto pm = e.text.find("+-"); pm != std::string::npos) {
    const double target = parse_number(e.text.substr(0, pm), text);
    std::string tol_text = strip(e.text.substr(pm + 2));
    double tol = 0.0;
    if (!tol_text.empty() && tol_text.back() == '%') {
      tol_text.pop_back();
      tol = std::abs(target) * parse_number(tol_text, text) / 100.0;
    } else {
      tol = parse_number(tol_text, text);
    }
    if (tol < 0.0) throw ConfigError("expectation '" + text + "': negative tolerance");
    e.lo = target - tol;
    e.hi = target + tol;
  } else {
    throw ConfigError("expectation '" + text + "': expected '<x> +- <tol>' or '<lo>..<hi>'");
  }
  if (!(e.lo <= e.hi)) throw ConfigError("expectation '" + text + "': empty range");
  return e;
}

std::filesystem::path ScenarioEnv::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : config_dir / p;
}

void ScenarioRegistry::add(ScenarioInfo info) {
  if (scenarios_.count(info.name))
    throw ConfigError("scenario '" + info.name + "' is already registered");
  auto name = info.name;
  scenarios_.emplace(std::move(name), std::move(info));
}

const ScenarioInfo* ScenarioRegistry::find(const std::string& name) const {
  const auto it = scenarios_.find(name);
  return it == scenarios_.end() ? nullptr : &it->second;
}

std::vector<std::string> ScenarioRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, info] : scenarios_) out.push_back(name);
  return out;
}

void ScenarioRegistry::list(std::ostream& out) const {
  std::size_t width = 0;
  for (const auto& [name, info] : scenarios_) width = std::max(width, name.size());
  for (const auto& [name, info] : scenarios_) {
    out << name << std::string(width - name.size() + 2, ' ') << info.description;
    if (!info.anchor.empty()) out << "  [" << info.anchor << ']';
    out << '\n';
  }
}

ScenarioRegistry ScenarioRegistry::builtin() {
  ScenarioRegistry r;
  register_builtin_scenarios(r);
  return r;
}

std::string format_with_unit(double value, const std::string& unit) {
  static const std::pair<double, const char*> prefixes[] = {
      {1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""}, {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}};
  const bool scalable = unit == "Hz" || unit == "s" || unit == "m" || unit == "W";
  double shown = value;
  std::string prefix;
  if (scalable && std::isfinite(value) && value != 0.0) {
    for (const auto& [scale, p] : prefixes) {
      if (std::abs(value) >= scale * (1.0 - 5e-5)) {
        shown = value / scale;
        prefix = p;
        break;
      }
    }
    if (std::abs(value) < 1e-9) {
      shown = value / 1e-9;
      prefix = "n";
    }
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", shown);
  return std::string(buf) + prefix + unit;
}

int run_scenario(const ScenarioRegistry& registry, const std::string& name,
                 const RunOptions& options, std::ostream& log) {
  const ScenarioInfo* info = registry.find(name);
  if (!info) {
    log << "unknown scenario '" << name << "'; registered scenarios:\n";
    for (const auto& n : registry.names()) log << "  " << n << '\n';
    return exit_usage;
  }

  ScenarioOutput output;
  std::map<std::string, Expectation> targets;
  try {
    Config cfg = load_config(*info, options.scenario_dir);
    for (const auto& [key, value] : options.overrides) cfg.override_with(key, value);
    targets = expectations(cfg);
    output = info->run(cfg, ScenarioEnv{options.scenario_dir});
  } catch (const std::exception& e) {
    log << name << ": error: " << e.what() << '\n';
    return exit_usage;
  }

  std::ostringstream summary;
  summary << "scenario=" << name << '\n';
  bool all_met = true;
  std::map<std::string, const Metric*> by_name;
  for (const auto& m : output.metrics) {
    by_name[m.name] = &m;
    summary << m.name << '=' << format_with_unit(m.value, m.unit)
            << " value=" << format_double(m.value);
    if (const auto it = targets.find(m.name); it != targets.end()) {
      const bool ok = it->second.met(m.value);
      all_met = all_met && ok;
      summary << " target=" << it->second.text << (ok ? " pass" : " FAIL");
    }
    summary << '\n';
  }
  for (const auto& [metric, target] : targets) {
    if (!by_name.count(metric)) {
      all_met = false;
      summary << metric << "=missing target=" << target.text << " FAIL\n";
    }
  }
  for (const auto& note : output.notes) summary << "note: " << note << '\n';
  for (const auto& w : output.fit.warnings) summary << "warning: " << w << '\n';
  summary << "status=" << (all_met ? "pass" : "fail") << '\n';

  try {
    const auto dir = options.out_root / name;
    std::filesystem::create_directories(dir);
    write_file(dir / "data.csv", output.data_csv);
    std::ostringstream fit;
    write_fit_report(fit, output.fit);
    write_file(dir / "fit.txt", fit.str());
    write_file(dir / "summary.txt", summary.str());
  } catch (const std::exception& e) {
    log << name << ": error: " << e.what() << '\n';
    return exit_usage;
  }
  log << summary.str();
  return all_met ? exit_pass : exit_target_miss;
}

int check_scenarios(const ScenarioRegistry& registry, const RunOptions& options,
                    std::ostream& log) {
  int worst = exit_pass;
  for (const auto& name : registry.names()) {
    const ScenarioInfo* info = registry.find(name);
    try {
      if (expectations(load_config(*info, options.scenario_dir)).empty()) continue;
    } catch (const std::exception& e) {
      log << name << ": error: " << e.what() << '\n';
      worst = exit_usage;
      continue;
    }
    const int code = run_scenario(registry, name, options, log);
    log << name << ": " << (code == exit_pass ? "pass" : code == exit_target_miss ? "FAIL" : "error")
        << "\n\n";
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace memsim
