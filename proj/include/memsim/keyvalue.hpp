#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace memsim {

// Ordered key=value settings. Blank lines and '#' comments are skipped;
// keys are unique.
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  // Comma-separated numbers.
  std::vector<double> numbers(const std::string& key) const;

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  // Replaces an existing key; unknown keys raise ConfigError.
  void override_with(const std::string& key, std::string value);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Splits "key=value"; throws ConfigError when there is no '=' or the key is
// empty.
std::pair<std::string, std::string> split_assignment(const std::string& text);

}  // namespace memsim
