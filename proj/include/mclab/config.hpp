#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace mclab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict key/value config text:
///   [section]
///   key = value
/// Keys are stored as "section.key" ("key" outside any section). Duplicate
/// keys, garbage lines, and (at the consumer level) unknown keys are errors.
class ConfigMap {
 public:
  static ConfigMap parse_file(const std::string& path);
  static ConfigMap parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  double get_double(const std::string& key, double fallback) const;

  /// Every key must have been consumed through one of the getters above;
  /// leftovers raise ConfigError naming the offending key.
  void check_all_consumed() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> consumed_;
};

}  // namespace mclab
