#include "carleman/config.hpp"

#include <cstdlib>
#include <sstream>

#include "carleman/fieldio.hpp"
#include "carleman/util.hpp"

namespace carleman {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string key_name(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', ErrorCode::CONFIG_ERROR,
              "malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::CONFIG_ERROR,
            "expected key = value at line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), ErrorCode::CONFIG_ERROR,
            "empty key at line " + std::to_string(lineno));
    cfg.data_[section][key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) { return parse(read_text_file(path)); }

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  data_[section][key] = value;
}

void Config::set_override(const std::string& dotted) {
  std::size_t eq = dotted.find('=');
  require(eq != std::string::npos, ErrorCode::CONFIG_ERROR,
          "override must be section.key=value: " + dotted);
  std::string path = trim(dotted.substr(0, eq));
  std::size_t dot = path.find('.');
  require(dot != std::string::npos, ErrorCode::CONFIG_ERROR,
          "override must be section.key=value: " + dotted);
  set(path.substr(0, dot), path.substr(dot + 1), trim(dotted.substr(eq + 1)));
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s != data_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  fail(ErrorCode::CONFIG_ERROR, "missing config key " + key_name(section, key));
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get_string(section, key);
  char* end = nullptr;
  double out = std::strtod(v.c_str(), &end);
  require(end && *end == '\0' && end != v.c_str(), ErrorCode::CONFIG_ERROR,
          "not a number at " + key_name(section, key) + ": '" + v + "'");
  return out;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  double v = get_double(section, key);
  int out = static_cast<int>(v);
  require(static_cast<double>(out) == v, ErrorCode::CONFIG_ERROR,
          "not an integer at " + key_name(section, key));
  return out;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t Config::get_seed(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get_string(section, key);
  char* end = nullptr;
  unsigned long long out = std::strtoull(v.c_str(), &end, 10);
  require(end && *end == '\0' && end != v.c_str(), ErrorCode::CONFIG_ERROR,
          "not a seed at " + key_name(section, key));
  return out;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
  std::string v = get_string(section, key);
  for (char& c : v)
    if (c == ',') c = ' ';
  std::istringstream in(v);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  require(!out.empty(), ErrorCode::CONFIG_ERROR, "empty list at " + key_name(section, key));
  return out;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  return has(section, key) ? get_doubles(section, key) : fallback;
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [section, kv] : data_) {
    os << "[" << section << "]\n";
    for (const auto& [key, value] : kv) os << key << " = " << value << "\n";
  }
  return os.str();
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

Geometry geometry_from_config(const Config& cfg) {
  int dim = cfg.get_int("geometry", "dim");
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::CONFIG_ERROR, "[geometry] dim must be 1..3");
  auto lo = cfg.get_doubles("geometry", "omega_lo");
  auto hi = cfg.get_doubles("geometry", "omega_hi");
  auto x0v = cfg.get_doubles("geometry", "x0");
  require(static_cast<int>(lo.size()) == dim && static_cast<int>(hi.size()) == dim &&
              static_cast<int>(x0v.size()) == dim,
          ErrorCode::CONFIG_ERROR, "[geometry] omega_lo/omega_hi/x0 must have dim entries");
  Box box;
  box.dim = dim;
  Point x0{};
  for (int a = 0; a < dim; ++a) {
    box.lo[a] = lo[static_cast<std::size_t>(a)];
    box.hi[a] = hi[static_cast<std::size_t>(a)];
    x0[a] = x0v[static_cast<std::size_t>(a)];
  }
  return Geometry::make(box, x0, cfg.get_double("geometry", "eta"),
                        cfg.get_double("geometry", "T"), cfg.get_double("geometry", "d_level"));
}

void geometry_to_config(const Geometry& geom, Config& cfg) {
  cfg.set("geometry", "dim", std::to_string(geom.dim()));
  auto join = [&](auto get) {
    std::string s;
    for (int a = 0; a < geom.dim(); ++a) s += (a ? " " : "") + format_double(get(a));
    return s;
  };
  cfg.set("geometry", "omega_lo", join([&](int a) { return geom.omega().lo[a]; }));
  cfg.set("geometry", "omega_hi", join([&](int a) { return geom.omega().hi[a]; }));
  cfg.set("geometry", "x0", join([&](int a) { return geom.x0()[a]; }));
  cfg.set("geometry", "eta", format_double(geom.eta()));
  cfg.set("geometry", "T", format_double(geom.T()));
  cfg.set("geometry", "d_level", format_double(geom.d_level()));
}

}  // namespace carleman
