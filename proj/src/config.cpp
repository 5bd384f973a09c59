#include "driftlab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "driftlab/errors.hpp"

namespace driftlab::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t cmt = line.find_first_of("#;");
    if (cmt != std::string::npos) line = line.substr(0, cmt);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        std::ostringstream msg;
        msg << origin << ':' << lineno << ": unterminated section header";
        throw ConfigError(msg.str());
      }
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << origin << ':' << lineno << ": expected 'key = value'";
      throw ConfigError(msg.str());
    }
    if (section.empty()) {
      std::ostringstream msg;
      msg << origin << ':' << lineno << ": key before any [section] header";
      throw ConfigError(msg.str());
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << origin << ':' << lineno << ": empty key";
      throw ConfigError(msg.str());
    }
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string Config::get(const std::string& section,
                        const std::string& key) const {
  auto it = sections_.find(section);
  if (it != sections_.end()) {
    auto kit = it->second.find(key);
    if (kit != it->second.end()) return kit->second;
  }
  throw ConfigError(origin_ + ": missing key '" + key + "' in section [" +
                    section + "]");
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
  std::string v = get(section, key);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section +
                      "] is not a number: '" + v + "'");
  return out;
}

double Config::get_double_or(const std::string& section,
                             const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int_or(const std::string& section, const std::string& key,
                       int fallback) const {
  if (!has(section, key)) return fallback;
  double v = get_double(section, key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError(origin_ + ": field '" + key + "' in [" + section +
                      "] is not an integer");
  return i;
}

}  // namespace driftlab::config
