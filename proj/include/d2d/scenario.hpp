#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "d2d/units.hpp"

namespace d2d {

/// Bad configuration key or value. Carries the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Method { kBac, kDac, kOac };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::kBac: return "bac";
    case Method::kDac: return "dac";
    case Method::kOac: return "oac";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "bac") return Method::kBac;
  if (s == "dac") return Method::kDac;
  if (s == "oac") return Method::kOac;
  throw ConfigError("methods", "unknown method '" + std::string(s) + "'");
}

/// Every physical, protocol and method parameter of a run. Defaults are the
/// 7-cell macro scenario (R = 400 m, 23 dBm devices, 10 pairs per cell).
struct ScenarioConfig {
  // Layout and drops.
  double cell_radius_m = 400.0;
  int n_cells = 7;
  int pairs_per_cell = 10;
  double d_min_m = 10.0;     // BS to any user
  double d2d_min_m = 10.0;   // intra-pair separation bounds
  double d2d_max_m = 40.0;

  // Radio.
  double noise_density_dbm_hz = kThermalNoiseDbmPerHz;
  double bandwidth_hz = 180e3;
  double carrier_hz = 2e9;  // metadata only; path loss is c * d^-alpha
  double p_d_max_dbm = 23.0;
  double p_c_max_dbm = 23.0;
  double c0_db = -30.55;
  double cd_db = -28.03;
  double alpha0 = 3.67;
  double alpha_d = 4.0;
  double shadow_sigma_bs_db = 8.0;
  double shadow_sigma_d2d_db = 8.0;
  bool fading = false;

  // Cellular layer.
  double alpha_p = 0.8;
  double gamma_cue_th_db = 10.0;
  bool ofpc_shadowing = true;

  // Method targets.
  double delta_db = 2.0;
  double gamma_d_db = 16.0;

  // Statistical model.
  bool normalized_pdf = false;

  // BAC. NaN selects the closed-form design point.
  double bac_p_r_d_dbm = std::numeric_limits<double>::quiet_NaN();
  bool bac_clamp = false;

  // DAC.
  int dac_max_iters = 10;
  bool dac_sequential = true;

  // OAC.
  int oac_max_pairs = 16;
  int oac_realizations = 100;
  std::uint64_t oac_node_budget = 2'000'000;

  // Harness.
  int realizations = 5000;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods = {Method::kBac, Method::kDac};
  int workers = 0;  // 0: D2D_WORKERS env var or hardware concurrency

  double noise_dbm() const {
    return d2d::noise_dbm(noise_density_dbm_hz, bandwidth_hz);
  }
  double noise_mw() const { return dbm_to_mw(noise_dbm()); }
  double p_d_max_mw() const { return dbm_to_mw(p_d_max_dbm); }
  double p_c_max_mw() const { return dbm_to_mw(p_c_max_dbm); }
  double delta() const { return db_to_linear(delta_db); }
  double gamma_d() const { return db_to_linear(gamma_d_db); }
  double cell_area() const { return disc_area(cell_radius_m); }
  bool has_method(Method m) const {
    for (Method x : methods)
      if (x == m) return true;
    return false;
  }
  int total_pairs() const { return n_cells * pairs_per_cell; }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size())
    throw ConfigError(key, "key '" + key + "': not a number: '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size())
    throw ConfigError(key, "key '" + key + "': not an integer: '" + v + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    if (!v.empty() && v[0] != '-') out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size())
    throw ConfigError(key, "key '" + key + "': not an unsigned integer: '" +
                               v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "key '" + key + "': not a boolean: '" + v + "'");
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

struct KeySpec {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

inline KeySpec real_key(double ScenarioConfig::*field, const char* name) {
  std::string key = name;
  return {[field, key](ScenarioConfig& c, const std::string& v) {
            c.*field = parse_double(key, v);
          },
          [field](const ScenarioConfig& c) { return format_double(c.*field); }};
}

inline KeySpec int_key(int ScenarioConfig::*field, const char* name) {
  std::string key = name;
  return {[field, key](ScenarioConfig& c, const std::string& v) {
            const long long x = parse_int(key, v);
            if (x < std::numeric_limits<int>::min() ||
                x > std::numeric_limits<int>::max())
              throw ConfigError(key, "key '" + key + "': out of range");
            c.*field = static_cast<int>(x);
          },
          [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
}

inline KeySpec u64_key(std::uint64_t ScenarioConfig::*field, const char* name) {
  std::string key = name;
  return {[field, key](ScenarioConfig& c, const std::string& v) {
            c.*field = parse_u64(key, v);
          },
          [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
}

inline KeySpec bool_key(bool ScenarioConfig::*field, const char* name) {
  std::string key = name;
  return {[field, key](ScenarioConfig& c, const std::string& v) {
            c.*field = parse_bool(key, v);
          },
          [field](const ScenarioConfig& c) {
            return std::string(c.*field ? "true" : "false");
          }};
}

inline const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = [] {
    using C = ScenarioConfig;
    std::map<std::string, KeySpec> t;
    t["cell_radius_m"] = real_key(&C::cell_radius_m, "cell_radius_m");
    t["n_cells"] = int_key(&C::n_cells, "n_cells");
    t["pairs_per_cell"] = int_key(&C::pairs_per_cell, "pairs_per_cell");
    t["d_min_m"] = real_key(&C::d_min_m, "d_min_m");
    t["d2d_min_m"] = real_key(&C::d2d_min_m, "d2d_min_m");
    t["d2d_max_m"] = real_key(&C::d2d_max_m, "d2d_max_m");
    t["noise_density_dbm_hz"] =
        real_key(&C::noise_density_dbm_hz, "noise_density_dbm_hz");
    t["bandwidth_hz"] = real_key(&C::bandwidth_hz, "bandwidth_hz");
    t["carrier_hz"] = real_key(&C::carrier_hz, "carrier_hz");
    t["p_d_max_dbm"] = real_key(&C::p_d_max_dbm, "p_d_max_dbm");
    t["p_c_max_dbm"] = real_key(&C::p_c_max_dbm, "p_c_max_dbm");
    t["c0_db"] = real_key(&C::c0_db, "c0_db");
    t["cd_db"] = real_key(&C::cd_db, "cd_db");
    t["alpha0"] = real_key(&C::alpha0, "alpha0");
    t["alpha_d"] = real_key(&C::alpha_d, "alpha_d");
    t["shadow_sigma_bs_db"] =
        real_key(&C::shadow_sigma_bs_db, "shadow_sigma_bs_db");
    t["shadow_sigma_d2d_db"] =
        real_key(&C::shadow_sigma_d2d_db, "shadow_sigma_d2d_db");
    t["fading"] = bool_key(&C::fading, "fading");
    t["alpha_p"] = real_key(&C::alpha_p, "alpha_p");
    t["gamma_cue_th_db"] = real_key(&C::gamma_cue_th_db, "gamma_cue_th_db");
    t["ofpc_shadowing"] = bool_key(&C::ofpc_shadowing, "ofpc_shadowing");
    t["delta_db"] = real_key(&C::delta_db, "delta_db");
    t["gamma_d_db"] = real_key(&C::gamma_d_db, "gamma_d_db");
    t["normalized_pdf"] = bool_key(&C::normalized_pdf, "normalized_pdf");
    t["bac_p_r_d_dbm"] = real_key(&C::bac_p_r_d_dbm, "bac_p_r_d_dbm");
    t["bac_clamp"] = bool_key(&C::bac_clamp, "bac_clamp");
    t["dac_max_iters"] = int_key(&C::dac_max_iters, "dac_max_iters");
    t["dac_sequential"] = bool_key(&C::dac_sequential, "dac_sequential");
    t["oac_max_pairs"] = int_key(&C::oac_max_pairs, "oac_max_pairs");
    t["oac_realizations"] = int_key(&C::oac_realizations, "oac_realizations");
    t["oac_node_budget"] = u64_key(&C::oac_node_budget, "oac_node_budget");
    t["realizations"] = int_key(&C::realizations, "realizations");
    t["master_seed"] = u64_key(&C::master_seed, "master_seed");
    t["workers"] = int_key(&C::workers, "workers");
    t["methods"] = KeySpec{
        [](C& c, const std::string& v) {
          std::vector<Method> ms;
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            ms.push_back(parse_method(item));
          }
          c.methods = ms;
        },
        [](const C& c) {
          std::string s;
          for (Method m : c.methods) {
            if (!s.empty()) s += ',';
            s += method_name(m);
          }
          return s;
        }};
    // Convenience alias: one sigma for both link kinds.
    t["shadow_sigma_db"] = KeySpec{
        [](C& c, const std::string& v) {
          c.shadow_sigma_bs_db = c.shadow_sigma_d2d_db =
              parse_double("shadow_sigma_db", v);
        },
        nullptr};
    return t;
  }();
  return table;
}

}  // namespace detail

/// Sets one key. Unknown keys and unparsable values throw ConfigError.
inline void set_config_value(ScenarioConfig& cfg, const std::string& key,
                             const std::string& value) {
  const auto& t = detail::key_table();
  const auto it = t.find(key);
  if (it == t.end()) throw ConfigError(key, "unknown config key '" + key + "'");
  it->second.set(cfg, detail::trim(value));
}

/// Applies a "key=value" override.
inline void apply_override(ScenarioConfig& cfg, std::string_view kv) {
  const auto eq = kv.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError(std::string(kv), "override '" + std::string(kv) +
                                           "' is not of the form key=value");
  set_config_value(cfg, detail::trim(kv.substr(0, eq)),
                   detail::trim(kv.substr(eq + 1)));
}

/// Parses a flat "key = value" document; '#' starts a comment. Missing keys
/// keep their defaults.
inline void parse_config_text(ScenarioConfig& cfg, std::string_view text) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.find('=') == std::string::npos)
      throw ConfigError(t, "line " + std::to_string(line_no) +
                               ": expected key = value");
    apply_override(cfg, t);
  }
}

/// Ordered key/value echo; feeding it back through set_config_value
/// reproduces the configuration exactly.
inline std::vector<std::pair<std::string, std::string>> config_entries(
    const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, spec] : detail::key_table())
    if (spec.get) out.emplace_back(k, spec.get(cfg));
  return out;
}

inline std::string config_to_text(const ScenarioConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : config_entries(cfg)) s += k + " = " + v + "\n";
  return s;
}

/// Range and consistency checks shared by every entry point.
inline void validate(const ScenarioConfig& c) {
  auto fail = [](const char* key, const std::string& msg) {
    throw ConfigError(key, std::string("key '") + key + "': " + msg);
  };
  if (!(c.cell_radius_m > 0)) fail("cell_radius_m", "must be > 0");
  if (c.n_cells != 1 && c.n_cells != 7) fail("n_cells", "must be 1 or 7");
  if (c.pairs_per_cell < 0) fail("pairs_per_cell", "must be >= 0");
  if (!(c.d_min_m > 0 && c.d_min_m < c.cell_radius_m))
    fail("d_min_m", "must satisfy 0 < d_min_m < cell_radius_m");
  if (!(c.d2d_min_m > 0)) fail("d2d_min_m", "must be > 0");
  if (!(c.d2d_max_m >= c.d2d_min_m)) fail("d2d_max_m", "must be >= d2d_min_m");
  if (!(c.bandwidth_hz > 0)) fail("bandwidth_hz", "must be > 0");
  if (!(c.alpha0 > 2)) fail("alpha0", "must be > 2");
  if (!(c.alpha_d > 2)) fail("alpha_d", "must be > 2");
  if (!(c.shadow_sigma_bs_db >= 0)) fail("shadow_sigma_bs_db", "must be >= 0");
  if (!(c.shadow_sigma_d2d_db >= 0))
    fail("shadow_sigma_d2d_db", "must be >= 0");
  if (!(c.alpha_p >= 0 && c.alpha_p <= 1)) fail("alpha_p", "must be in [0,1]");
  if (!(c.delta_db > 0)) fail("delta_db", "must be > 0");
  if (!std::isfinite(c.gamma_d_db)) fail("gamma_d_db", "must be finite");
  if (c.dac_max_iters < 1) fail("dac_max_iters", "must be >= 1");
  if (c.oac_max_pairs < 0) fail("oac_max_pairs", "must be >= 0");
  if (c.oac_realizations < 0) fail("oac_realizations", "must be >= 0");
  if (c.realizations < 0) fail("realizations", "must be >= 0");
  if (c.workers < 0) fail("workers", "must be >= 0");
}

}  // namespace d2d
