#include "xling/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace xling {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw DataError(path + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void Config::set_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw UsageError("override must look like key=value: '" + assignment + "'");
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string Config::get_string(const std::string& key, const std::string& def) {
  auto it = values_.find(key);
  std::string v = it == values_.end() ? def : it->second;
  effective_[key] = v;
  return v;
}

std::string Config::require_string(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw UsageError("missing required config key: " + key);
  effective_[key] = it->second;
  return it->second;
}

long long Config::get_int(const std::string& key, long long def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    effective_[key] = std::to_string(def);
    return def;
  }
  char* end = nullptr;
  long long v = std::strtoll(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw DataError("config key " + key + " is not an integer: '" +
                    it->second + "'");
  effective_[key] = it->second;
  return v;
}

double Config::get_double(const std::string& key, double def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    effective_[key] = format_double(def);
    return def;
  }
  char* end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw DataError("config key " + key + " is not a number: '" + it->second +
                    "'");
  effective_[key] = it->second;
  return v;
}

std::vector<long long> Config::get_int_list(const std::string& key,
                                            const std::vector<long long>& def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < def.size(); ++i)
      ss << (i ? "," : "") << def[i];
    effective_[key] = ss.str();
    return def;
  }
  std::vector<long long> out;
  std::istringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    long long v = std::strtoll(item.c_str(), &end, 10);
    if (end == item.c_str() || *end != '\0')
      throw DataError("config key " + key + " has a non-integer item: '" +
                      item + "'");
    out.push_back(v);
  }
  effective_[key] = it->second;
  return out;
}

std::vector<std::string> Config::get_string_list(
    const std::string& key, const std::vector<std::string>& def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < def.size(); ++i)
      ss << (i ? "," : "") << def[i];
    effective_[key] = ss.str();
    return def;
  }
  std::vector<std::string> out;
  std::istringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  effective_[key] = it->second;
  return out;
}

bool Config::get_bool(const std::string& key, bool def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    effective_[key] = def ? "true" : "false";
    return def;
  }
  effective_[key] = it->second;
  if (it->second == "true" || it->second == "1" || it->second == "on")
    return true;
  if (it->second == "false" || it->second == "0" || it->second == "off")
    return false;
  throw DataError("config key " + key + " is not a boolean: '" + it->second +
                  "'");
}

void Config::save_effective(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write effective config: " + path);
  for (const auto& [k, v] : effective_) out << k << " = " << v << '\n';
}

}  // namespace xling
