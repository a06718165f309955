#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "d2d/harness.hpp"
#include "d2d/metrics.hpp"
#include "d2d/scenario.hpp"

// CSV / JSON artifacts. Doubles are written with 17 significant digits so
// that every file reads back to the exact in-memory values.

namespace d2d {

inline constexpr const char* kRecordsSchema = "# d2d-records v1";
inline constexpr const char* kCdfSchema = "# d2d-cdf v1";
inline constexpr const char* kBoundSchema = "# d2d-bound v1";
inline constexpr const char* kSweepSchema = "# d2d-sweep v1";

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "method",        "realization",     "seed",
      "drop_hash",     "cue_sinr_db",     "cue_baseline_sinr_db",
      "cue_sinr_loss_db", "n_active",     "n_with_qos",
      "se_total",      "se_d2d",          "se_baseline",
      "n_active_network", "n_with_qos_network", "iterations",
      "converged",     "proven_optimal",  "nodes",
      "d2d_sinr_db"};
  return cols;
}

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double read_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

inline void write_records_csv(std::ostream& os,
                              const std::vector<MetricsRecord>& recs) {
  os << kRecordsSchema << '\n';
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : recs) {
    os << method_name(r.method) << ',' << r.realization << ',' << r.seed << ','
       << r.drop_hash << ',' << detail::fmt(r.cue_sinr_db) << ','
       << detail::fmt(r.cue_baseline_sinr_db) << ','
       << detail::fmt(r.cue_sinr_loss_db) << ',' << r.n_active << ','
       << r.n_with_qos << ',' << detail::fmt(r.se_total) << ','
       << detail::fmt(r.se_d2d) << ',' << detail::fmt(r.se_baseline) << ','
       << r.n_active_network << ',' << r.n_with_qos_network << ','
       << r.iterations << ',' << int(r.converged) << ','
       << int(r.proven_optimal) << ',' << r.nodes << ',';
    for (std::size_t k = 0; k < r.d2d_sinr_db.size(); ++k)
      os << (k ? ";" : "") << detail::fmt(r.d2d_sinr_db[k]);
    os << '\n';
  }
}

inline std::vector<MetricsRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != kRecordsSchema)
    throw std::runtime_error("records.csv: missing or unknown schema line");
  if (!std::getline(is, line)) throw std::runtime_error("records.csv: no header");
  if (detail::split(detail::strip_cr(line), ',') != record_columns())
    throw std::runtime_error("records.csv: unexpected columns");
  std::vector<MetricsRecord> out;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != record_columns().size())
      throw std::runtime_error("records.csv: wrong field count");
    MetricsRecord r;
    r.method = parse_method(f[0]);
    r.realization = std::stoi(f[1]);
    r.seed = std::stoull(f[2]);
    r.drop_hash = std::stoull(f[3]);
    r.cue_sinr_db = detail::read_double(f[4]);
    r.cue_baseline_sinr_db = detail::read_double(f[5]);
    r.cue_sinr_loss_db = detail::read_double(f[6]);
    r.n_active = std::stoi(f[7]);
    r.n_with_qos = std::stoi(f[8]);
    r.se_total = detail::read_double(f[9]);
    r.se_d2d = detail::read_double(f[10]);
    r.se_baseline = detail::read_double(f[11]);
    r.n_active_network = std::stoi(f[12]);
    r.n_with_qos_network = std::stoi(f[13]);
    r.iterations = std::stoi(f[14]);
    r.converged = f[15] == "1";
    r.proven_optimal = f[16] == "1";
    r.nodes = std::stoull(f[17]);
    if (!f[18].empty())
      for (const auto& v : detail::split(f[18], ';'))
        r.d2d_sinr_db.push_back(detail::read_double(v));
    out.push_back(std::move(r));
  }
  return out;
}

// JSON ------------------------------------------------------------------

namespace detail {

inline nlohmann::json num(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double num_of(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline nlohmann::json to_json(const MetricStats& s) {
  return {{"n", s.n},
          {"p5", num(s.p5)},
          {"p50", num(s.p50)},
          {"p95", num(s.p95)},
          {"mean", num(s.mean)}};
}

inline MetricStats metric_stats_from_json(const nlohmann::json& j) {
  MetricStats s;
  s.n = j.at("n").get<std::size_t>();
  s.p5 = num_of(j.at("p5"));
  s.p50 = num_of(j.at("p50"));
  s.p95 = num_of(j.at("p95"));
  s.mean = num_of(j.at("mean"));
  return s;
}

}  // namespace detail

inline nlohmann::json to_json(const SummaryStats& s) {
  using detail::num;
  using detail::to_json;
  return {{"method", std::string(method_name(s.method))},
          {"realizations", s.realizations},
          {"cue_sinr_loss_db", to_json(s.cue_sinr_loss_db)},
          {"d2d_sinr_db", to_json(s.d2d_sinr_db)},
          {"n_with_qos", to_json(s.n_with_qos)},
          {"n_active", to_json(s.n_active)},
          {"se_total", to_json(s.se_total)},
          {"se_d2d", to_json(s.se_d2d)},
          {"se_baseline", to_json(s.se_baseline)},
          {"cue_outage", num(s.cue_outage)},
          {"d2d_outage", num(s.d2d_outage)},
          {"dac_converged_fraction", num(s.dac_converged_fraction)},
          {"oac_proven_fraction", num(s.oac_proven_fraction)},
          {"mean_iterations", num(s.mean_iterations)},
          {"mean_nodes", num(s.mean_nodes)}};
}

inline SummaryStats summary_stats_from_json(const nlohmann::json& j) {
  using detail::metric_stats_from_json;
  using detail::num_of;
  SummaryStats s;
  s.method = parse_method(j.at("method").get<std::string>());
  s.realizations = j.at("realizations").get<std::size_t>();
  s.cue_sinr_loss_db = metric_stats_from_json(j.at("cue_sinr_loss_db"));
  s.d2d_sinr_db = metric_stats_from_json(j.at("d2d_sinr_db"));
  s.n_with_qos = metric_stats_from_json(j.at("n_with_qos"));
  s.n_active = metric_stats_from_json(j.at("n_active"));
  s.se_total = metric_stats_from_json(j.at("se_total"));
  s.se_d2d = metric_stats_from_json(j.at("se_d2d"));
  s.se_baseline = metric_stats_from_json(j.at("se_baseline"));
  s.cue_outage = num_of(j.at("cue_outage"));
  s.d2d_outage = num_of(j.at("d2d_outage"));
  s.dac_converged_fraction = num_of(j.at("dac_converged_fraction"));
  s.oac_proven_fraction = num_of(j.at("oac_proven_fraction"));
  s.mean_iterations = num_of(j.at("mean_iterations"));
  s.mean_nodes = num_of(j.at("mean_nodes"));
  return s;
}

inline nlohmann::json config_json(const ScenarioConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
  return j;
}

inline nlohmann::json bac_json(const BacBounds& b, double cell_area) {
  using detail::num;
  return {{"p_r_d_mw", num(b.p_r_d)},
          {"p_hat_r_d_mw", num(b.p_hat_r_d)},
          {"n_c_ub_per_cell", num(b.n_c_ub * cell_area)},
          {"n_d_ub_per_cell", num(b.n_d_ub * cell_area)},
          {"n_ub_per_cell", num(b.n_ub * cell_area)}};
}

/// summary.json: config echo (string values, exact), per-method stats and
/// run diagnostics.
inline nlohmann::json summary_json(const RunReport& rep) {
  nlohmann::json j;
  j["schema"] = "d2d-summary v1";
  j["config"] = config_json(rep.config);
  j["workers"] = rep.workers;
  j["wall_seconds"] = rep.wall_seconds;
  j["bac"] = bac_json(rep.bac, rep.config.cell_area());
  j["methods"] = nlohmann::json::array();
  for (const auto& s : rep.summaries) j["methods"].push_back(to_json(s.stats));
  return j;
}

struct SummaryFile {
  ScenarioConfig config;
  std::vector<SummaryStats> methods;
};

inline SummaryFile read_summary_json(std::istream& is) {
  const auto j = nlohmann::json::parse(is);
  if (j.at("schema") != "d2d-summary v1")
    throw std::runtime_error("summary.json: unknown schema");
  SummaryFile f;
  for (const auto& [k, v] : j.at("config").items())
    set_config_value(f.config, k, v.get<std::string>());
  for (const auto& m : j.at("methods"))
    f.methods.push_back(summary_stats_from_json(m));
  return f;
}

inline nlohmann::json records_json(const std::vector<MetricsRecord>& recs) {
  auto arr = nlohmann::json::array();
  for (const auto& r : recs) {
    arr.push_back({{"method", std::string(method_name(r.method))},
                   {"realization", r.realization},
                   {"seed", r.seed},
                   {"drop_hash", r.drop_hash},
                   {"cue_sinr_db", r.cue_sinr_db},
                   {"cue_baseline_sinr_db", r.cue_baseline_sinr_db},
                   {"cue_sinr_loss_db", r.cue_sinr_loss_db},
                   {"d2d_sinr_db", r.d2d_sinr_db},
                   {"n_active", r.n_active},
                   {"n_with_qos", r.n_with_qos},
                   {"se_total", r.se_total},
                   {"se_d2d", r.se_d2d},
                   {"se_baseline", r.se_baseline},
                   {"n_active_network", r.n_active_network},
                   {"n_with_qos_network", r.n_with_qos_network},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"proven_optimal", r.proven_optimal},
                   {"nodes", r.nodes}});
  }
  return arr;
}

inline std::vector<MetricsRecord> read_records_json(const nlohmann::json& arr) {
  std::vector<MetricsRecord> out;
  for (const auto& j : arr) {
    MetricsRecord r;
    r.method = parse_method(j.at("method").get<std::string>());
    r.realization = j.at("realization");
    r.seed = j.at("seed");
    r.drop_hash = j.at("drop_hash");
    r.cue_sinr_db = j.at("cue_sinr_db");
    r.cue_baseline_sinr_db = j.at("cue_baseline_sinr_db");
    r.cue_sinr_loss_db = j.at("cue_sinr_loss_db");
    r.d2d_sinr_db = j.at("d2d_sinr_db").get<std::vector<double>>();
    r.n_active = j.at("n_active");
    r.n_with_qos = j.at("n_with_qos");
    r.se_total = j.at("se_total");
    r.se_d2d = j.at("se_d2d");
    r.se_baseline = j.at("se_baseline");
    r.n_active_network = j.at("n_active_network");
    r.n_with_qos_network = j.at("n_with_qos_network");
    r.iterations = j.at("iterations");
    r.converged = j.at("converged");
    r.proven_optimal = j.at("proven_optimal");
    r.nodes = j.at("nodes");
    out.push_back(std::move(r));
  }
  return out;
}

// CDF files ---------------------------------------------------------------

/// The four panels of the method comparison, by file stem.
inline const std::vector<std::string>& cdf_metrics() {
  static const std::vector<std::string> m = {"cue_sinr_loss", "d2d_sinr",
                                             "n_with_qos", "se"};
  return m;
}

inline const std::vector<double>& cdf_samples(const MetricsSummary& s,
                                              const std::string& metric) {
  if (metric == "cue_sinr_loss") return s.cue_sinr_loss_db;
  if (metric == "d2d_sinr") return s.d2d_sinr_db;
  if (metric == "n_with_qos") return s.n_with_qos;
  if (metric == "se") return s.se_total;
  throw std::invalid_argument("unknown CDF metric '" + metric + "'");
}

inline std::string cdf_filename(Method m, const std::string& metric) {
  return "cdf_" + std::string(method_name(m)) + "_" + metric + ".csv";
}

/// One row per sorted sample: value, F(value) at that rank.
inline void write_cdf_csv(std::ostream& os, const std::vector<double>& sorted) {
  os << kCdfSchema << "\nvalue,cdf\n";
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    os << detail::fmt(sorted[i]) << ',' << detail::fmt((i + 1) / n) << '\n';
}

inline std::vector<double> read_cdf_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::strip_cr(line) != kCdfSchema)
    throw std::runtime_error("cdf csv: missing or unknown schema line");
  std::getline(is, line);
  std::vector<double> out;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    out.push_back(detail::read_double(detail::split(line, ',').at(0)));
  }
  return out;
}

// Generic numeric tables (bound and sweep files) ----------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_table_csv(std::ostream& os, const char* schema,
                            const Table& t) {
  os << schema << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << detail::fmt(row[i]);
    os << '\n';
  }
}

inline Table read_table_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# d2d-", 0) != 0)
    throw std::runtime_error("table csv: missing schema line");
  Table t;
  if (!std::getline(is, line)) throw std::runtime_error("table csv: no header");
  t.columns = detail::split(detail::strip_cr(line), ',');
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& f : detail::split(line, ','))
      row.push_back(detail::read_double(f));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace d2d
