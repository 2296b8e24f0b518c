#include "memsim/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>

#include "memsim/errors.hpp"

namespace memsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc{} || ptr != end || t.empty())
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  return value;
}

}  // namespace

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw ConfigError("expected key=value, got '" + text + "'");
  std::string key = trim(text.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + text + "'");
  return {key, trim(text.substr(eq + 1))};
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw ParseError(number, line, "expected key=value");
    auto [key, value] = split_assignment(line);
    if (cfg.has(key)) throw ParseError(number, key, "duplicate key");
    cfg.values_.emplace(std::move(key), std::move(value));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const { return to_double(key, text(key)); }

int Config::integer(const std::string& key) const {
  const std::string& t = text(key);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config key '" + key + "': '" + t + "' is not an integer");
  return value;
}

bool Config::flag(const std::string& key) const {
  const std::string& t = text(key);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("config key '" + key + "': expected true or false");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  const std::string& t = text(key);
  std::size_t start = 0;
  while (start <= t.size()) {
    const auto comma = t.find(',', start);
    const auto end = comma == std::string::npos ? t.size() : comma;
    out.push_back(to_double(key, t.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void Config::override_with(const std::string& key, std::string value) {
  if (!has(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = std::move(value);
}

}  // namespace memsim
