#ifndef XLING_CONFIG_HPP
#define XLING_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "xling/common.hpp"

namespace xling {

// Flat hierarchical key-value configuration ("section.key = value" lines,
// '#' comments). Defaults materialize on access so the effective config
// can be written back for reproducibility.
class Config {
 public:
  Config() = default;
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // "key=value" as passed on a command line.
  void set_override(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& def);
  std::string require_string(const std::string& key);
  long long get_int(const std::string& key, long long def);
  double get_double(const std::string& key, double def);
  std::vector<long long> get_int_list(const std::string& key,
                                      const std::vector<long long>& def);
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& def);
  bool get_bool(const std::string& key, bool def);

  // All keys ever set or defaulted, in sorted order.
  void save_effective(const std::string& path) const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> effective_;
};

}  // namespace xling

#endif
