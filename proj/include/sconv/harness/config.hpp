// key = value configuration files with [sections].
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sconv/common.hpp"

namespace sconv::harness {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Flat map "section.key" -> value; keys before any section live in "".
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "<config>") {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("", origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    Config c;
    c.origin_ = origin;
    for (const auto& [key, node] : tree) {
      if (node.empty()) {
        c.values_[key] = node.data();
        continue;
      }
      for (const auto& [sub, leaf] : node) c.values_[key + "." + sub] = leaf.data();
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open " + path);
    return parse(in, path);
  }

  static Config from_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& origin() const { return origin_; }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "missing");
    return it->second;
  }
  std::string str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

  double num(const std::string& key) const { return to_double(key, str(key)); }
  double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

  std::int64_t integer(const std::string& key) const { return to_int(key, str(key)); }
  std::int64_t integer(const std::string& key, std::int64_t def) const { return has(key) ? integer(key) : def; }

  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const auto v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected a boolean, got '" + v + "'");
  }

  /// Comma-separated list; a:b expands to the integer range, 2^a:b to powers of two.
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) continue;
      const bool pow2 = item.rfind("2^", 0) == 0;
      const std::string body = pow2 ? item.substr(2) : item;
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        const auto lo = to_int(key, body.substr(0, colon)), hi = to_int(key, body.substr(colon + 1));
        if (hi < lo) throw ConfigError(key, "empty range " + item);
        for (auto k = lo; k <= hi; ++k) out.push_back(pow2 ? std::ldexp(1.0, static_cast<int>(k)) : static_cast<double>(k));
      } else {
        const double v = to_double(key, body);
        out.push_back(pow2 ? std::pow(2.0, v) : v);
      }
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
  }
  std::vector<double> list(const std::string& key, std::vector<double> def) const {
    return has(key) ? list(key) : def;
  }

  std::vector<std::int64_t> int_list(const std::string& key) const {
    std::vector<std::int64_t> out;
    for (double v : list(key)) {
      if (v != std::floor(v)) throw ConfigError(key, "expected integers");
      out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
  }
  std::vector<std::int64_t> int_list(const std::string& key, std::vector<std::int64_t> def) const {
    return has(key) ? int_list(key) : def;
  }

 private:
  static double to_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + v + "'");
    }
  }
  static std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const long long d = std::stoll(detail::trim(v), &pos);
      if (pos != detail::trim(v).size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
};

inline constexpr const char* kWorkersEnv = "SCONV_WORKERS";

inline int default_workers() {
  if (const char* e = std::getenv(kWorkersEnv)) {
    try {
      const int w = std::stoi(e);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    throw ConfigError(kWorkersEnv, "must be a positive integer");
  }
  return 1;
}

inline Theta parse_theta(const std::string& s) {
  if (s == "0") return Theta::ramanujan;
  if (s == "7/64") return Theta::kim_sarnak;
  if (s == "1/4") return Theta::weil;
  throw ConfigError("run.theta", "must be one of 0, 7/64, 1/4");
}

/// Shared knobs every experiment reads.
struct ExperimentConfig {
  std::string kind;
  std::string name;
  std::string output_dir = "out";
  int workers = 1;
  std::uint64_t seed = 1;
  Theta theta = Theta::kim_sarnak;
  double eps = 0.05;
  Config raw;

  static ExperimentConfig from(const Config& c) {
    ExperimentConfig e;
    e.raw = c;
    e.kind = c.str("run.kind");
    e.name = c.str("run.name", e.kind);
    e.output_dir = c.str("run.output", "out/" + e.name);
    e.workers = static_cast<int>(c.integer("run.workers", default_workers()));
    if (e.workers < 1) throw ConfigError("run.workers", "must be >= 1");
    const auto seed = c.integer("run.seed", 1);
    if (seed < 0) throw ConfigError("run.seed", "must be non-negative");
    e.seed = static_cast<std::uint64_t>(seed);
    e.theta = parse_theta(c.str("run.theta", "7/64"));
    e.eps = c.num("run.eps", 0.05);
    if (!(e.eps > 0.0 && e.eps < 0.5)) throw ConfigError("run.eps", "must lie in (0, 1/2)");
    for (const auto& [k, v] : c.values()) {
      const bool tol = k.find("tol") != std::string::npos;
      if (tol && !(c.num(k) > 0.0)) throw ConfigError(k, "tolerances must be positive");
      if (k.rfind("grid.X", 0) == 0)
        for (double X : c.list(k))
          if (X < 64) throw ConfigError(k, "X values must be >= 64");
    }
    return e;
  }
};

}  // namespace sconv::harness
