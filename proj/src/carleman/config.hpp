#pragma once

#include <map>
#include <string>
#include <vector>

#include "carleman/geometry.hpp"

namespace carleman {

// Sectioned key = value configuration. '#' starts a comment. Values are
// scalars, words, or whitespace-separated lists. All lookups report the
// missing "[section] key" on failure.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  // "section.key=value" override.
  void set_override(const std::string& dotted);

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_seed(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;

  // Sorted, normalized rendering: the reproducibility unit for manifests.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

Geometry geometry_from_config(const Config& cfg);
void geometry_to_config(const Geometry& geom, Config& cfg);

}  // namespace carleman
