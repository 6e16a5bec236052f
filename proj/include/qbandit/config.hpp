#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qbandit/common.hpp"
#include "qbandit/dists.hpp"
#include "qbandit/policy.hpp"
#include "qbandit/sim.hpp"

namespace qbandit {

// A run is described by one human-readable key-value document with a
// versioned schema. Unknown keys are a hard error, so a misspelled
// parameter can never fall back to a silent default.
class Config {
 public:
  static Config from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return from_string(buf.str(), path);
  }

  static Config from_string(const std::string& text, const std::string& origin = "<inline>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        throw config_error(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key))
        throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    const std::int64_t version = cfg.require_int("schema_version");
    if (version != 1) throw config_error(origin + ": unsupported schema_version");
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string require_string(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) throw config_error(origin_ + ": missing required key '" + key + "'");
    consumed_.insert(consumed_.end(), key);
    return it->second;
  }

  std::optional<std::string> optional_string(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    consumed_.insert(consumed_.end(), key);
    return it->second;
  }

  std::int64_t require_int(const std::string& key) { return parse_int(require_string(key), key); }
  std::optional<std::int64_t> optional_int(const std::string& key) {
    auto s = optional_string(key);
    if (!s) return std::nullopt;
    return parse_int(*s, key);
  }

  double require_number(const std::string& key) { return parse_number(require_string(key), key); }
  std::optional<double> optional_number(const std::string& key) {
    auto s = optional_string(key);
    if (!s) return std::nullopt;
    return parse_number(*s, key);
  }

  bool optional_bool(const std::string& key, bool fallback) {
    auto s = optional_string(key);
    if (!s) return fallback;
    if (*s == "true" || *s == "1") return true;
    if (*s == "false" || *s == "0") return false;
    throw config_error(origin_ + ": key '" + key + "' expects true/false");
  }

  std::vector<std::uint64_t> require_seeds(const std::string& key) {
    std::vector<std::uint64_t> out;
    for (const auto& part : split_list(require_string(key))) {
      out.push_back(static_cast<std::uint64_t>(parse_int(part, key)));
    }
    if (out.empty()) throw config_error(origin_ + ": key '" + key + "' expects a nonempty list");
    return out;
  }

  std::vector<double> require_numbers(const std::string& key) {
    std::vector<double> out;
    for (const auto& part : split_list(require_string(key))) out.push_back(parse_number(part, key));
    if (out.empty()) throw config_error(origin_ + ": key '" + key + "' expects a nonempty list");
    return out;
  }

  std::vector<std::string> require_strings(const std::string& key) {
    auto out = split_list(require_string(key));
    if (out.empty()) throw config_error(origin_ + ": key '" + key + "' expects a nonempty list");
    return out;
  }

  // Every key must be consumed by the selected command; leftovers are errors.
  void finish() const {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : values_) {
      if (std::find(consumed_.begin(), consumed_.end(), k) == consumed_.end()) unknown.push_back(k);
    }
    if (!unknown.empty()) {
      std::string msg = origin_ + ": unknown key(s):";
      for (const auto& k : unknown) msg += " '" + k + "'";
      throw config_error(msg);
    }
  }

  const std::string& origin() const { return origin_; }

  // Accepts decimals, scientific notation and exact fractions like 1/144.
  static double parse_number(const std::string& s, const std::string& key) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const double num = parse_plain(s.substr(0, slash), key);
      const double den = parse_plain(s.substr(slash + 1), key);
      if (den == 0.0) throw config_error("key '" + key + "': division by zero");
      return num / den;
    }
    return parse_plain(s, key);
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        const std::string t = trim(cur);
        if (!t.empty()) out.push_back(t);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
  }

  static double parse_plain(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
      throw config_error("key '" + key + "': cannot parse number '" + t + "'");
    return v;
  }

  static std::int64_t parse_int(const std::string& s, const std::string& key) {
    const std::string t = trim(s);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end == t.c_str() || *end != '\0')
      throw config_error("key '" + key + "': cannot parse integer '" + t + "'");
    return v;
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
  std::vector<std::string> consumed_;
};

// ---------------------------------------------------------------------------
// Spec-string parsing for distributions: name(arg,...).
// ---------------------------------------------------------------------------

namespace detail {

struct SpecCall {
  std::string name;
  std::vector<std::string> args;
};

inline SpecCall parse_spec_call(const std::string& s) {
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, {}};
  if (s.back() != ')') throw config_error("malformed spec '" + s + "'");
  SpecCall call;
  call.name = s.substr(0, open);
  std::string inner = s.substr(open + 1, s.size() - open - 2);
  std::string cur;
  for (char c : inner) {
    if (c == ',') {
      call.args.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) call.args.push_back(cur);
  return call;
}

inline std::vector<std::pair<double, double>> parse_points(const std::vector<std::string>& args) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& a : args) {
    const auto colon = a.find(':');
    if (colon == std::string::npos)
      throw config_error("finite support point '" + a + "' must look like value:prob");
    pts.emplace_back(Config::parse_number(a.substr(0, colon), "finite"),
                     Config::parse_number(a.substr(colon + 1), "finite"));
  }
  return pts;
}

}  // namespace detail

inline CapacityDistribution parse_capacity(const std::string& spec) {
  const auto call = detail::parse_spec_call(spec);
  if (call.name == "pointmass" && call.args.size() == 1)
    return CapacityDistribution::point_mass(Config::parse_number(call.args[0], "pointmass"));
  if (call.name == "uniform01" && call.args.empty()) return CapacityDistribution::uniform01();
  if (call.name == "finite" && !call.args.empty())
    return CapacityDistribution::finite_support(detail::parse_points(call.args));
  if (call.name == "truncated-reciprocal" && call.args.size() == 1)
    return CapacityDistribution::truncated_reciprocal(
        Config::parse_number(call.args[0], "truncated-reciprocal"));
  if (call.name == "converse" && call.args.size() == 2)
    return CapacityDistribution::converse(Config::parse_number(call.args[0], "converse"),
                                          static_cast<int>(Config::parse_number(call.args[1], "converse")));
  throw config_error("unknown capacity spec '" + spec + "'");
}

inline ArrivalDistribution parse_arrival(const std::string& spec) {
  const auto call = detail::parse_spec_call(spec);
  if (call.name == "bernoulli" && call.args.size() == 1)
    return ArrivalDistribution::bernoulli(Config::parse_number(call.args[0], "bernoulli"));
  if (call.name == "finite" && !call.args.empty())
    return ArrivalDistribution::finite_support(detail::parse_points(call.args));
  throw config_error("unknown arrival spec '" + spec + "'");
}

// environment = converse | env0 | custom; converse takes env.epsilon and
// env.k (k = 0 selects Environment 0).
inline Environment build_environment(Config& cfg) {
  const std::string family = cfg.require_string("environment");
  if (family == "converse") {
    const double eps = cfg.require_number("env.epsilon");
    const auto k = cfg.require_int("env.k");
    if (k == 0) return make_env0(eps);
    return make_converse_environment(eps, static_cast<int>(k));
  }
  if (family == "env0") {
    return make_env0(cfg.require_number("env.epsilon"));
  }
  if (family == "custom") {
    auto arrival = parse_arrival(cfg.require_string("env.arrival"));
    auto capacity = parse_capacity(cfg.require_string("env.capacity"));
    return make_custom_environment(std::move(arrival), std::move(capacity));
  }
  throw config_error("unknown environment family '" + family + "'");
}

struct PolicySpec {
  std::string name;
  PolicyFactory factory;
};

inline PolicySpec build_policy(Config& cfg, const Environment& env) {
  const std::string kind = cfg.require_string("policy");
  if (kind == "phased-ucb") {
    const double c = cfg.require_number("policy.c");
    const double delta = cfg.require_number("policy.delta");
    PhaseSchedule sched(c, delta);
    return {kind, [sched]() { return std::make_unique<PhasedUcbPolicy>(sched); }};
  }
  if (kind == "ucb1") {
    const double eps = cfg.require_number("policy.epsilon");
    return {kind, [eps]() { return std::make_unique<KnownEpsUcbPolicy>(eps); }};
  }
  if (kind == "fixed-rate") {
    const double rate = cfg.require_number("policy.rate");
    return {kind, [rate]() { return std::make_unique<FixedRatePolicy>(rate); }};
  }
  if (kind == "oracle-grid") {
    int d = 0;
    if (auto explicit_d = cfg.optional_int("policy.d")) {
      d = static_cast<int>(*explicit_d);
    } else {
      if (env.slack <= 0.0)
        throw config_error("oracle-grid needs policy.d for environments without positive slack");
      d = static_cast<int>(ceil_guarded(3.0 / env.slack));
    }
    Environment env_copy = env;
    return {kind, [env_copy, d]() { return std::make_unique<OracleGridPolicy>(env_copy, d); }};
  }
  throw config_error("unknown policy '" + kind + "'");
}

inline SimConfig build_sim_config(Config& cfg) {
  SimConfig sim;
  sim.horizon = cfg.require_int("horizon");
  sim.seeds = cfg.require_seeds("seeds");
  sim.record_stride = cfg.optional_int("record_stride").value_or(1);
  sim.validate();
  return sim;
}

}  // namespace qbandit
