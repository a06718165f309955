#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "d2d/harness.hpp"
#include "d2d/report_io.hpp"
#include "d2d/scenario.hpp"

// Command-line front end. Exit codes: 0 success, 2 configuration or usage
// error, 3 runtime failure.

namespace d2d::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::string format = "csv";
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  bool dump_dac_iterations = false;
  bool dump_gains = false;

  // sweep
  std::string axis;
  std::string values;
  std::string axis2;
  std::string values2;

  // bound
  double prd_min_dbm = -130.0;
  double prd_max_dbm = -40.0;
  int prd_points = 181;
  std::string delta_values = "0.5:0.5:40";
  std::string d2d_max_values = "20:5:100";

  // oac
  std::optional<int> max_pairs;
  int realization = 0;
};

/// "a,b,c" or "lo:step:hi" (inclusive, tolerant to rounding).
inline std::vector<double> parse_values(const std::string& key,
                                        const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto p = detail::split(text, ':');
    if (p.size() != 3) throw ConfigError(key, "range must be lo:step:hi");
    const double lo = detail::parse_double(key, p[0]);
    const double step = detail::parse_double(key, p[1]);
    const double hi = detail::parse_double(key, p[2]);
    if (!(step > 0) || hi < lo)
      throw ConfigError(key, "range needs step > 0 and hi >= lo");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + i * step);
  } else {
    for (const auto& f : detail::split(text, ','))
      out.push_back(detail::parse_double(key, detail::trim(f)));
  }
  if (out.empty()) throw ConfigError(key, "no values given");
  return out;
}

inline ScenarioConfig load_config(const Invocation& inv) {
  ScenarioConfig cfg;
  if (!inv.config_path.empty()) {
    std::ifstream in(inv.config_path);
    if (!in) throw ConfigError("config", "cannot read " + inv.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    parse_config_text(cfg, ss.str());
  }
  for (const auto& kv : inv.overrides) apply_override(cfg, kv);
  if (inv.workers) cfg.workers = *inv.workers;
  if (inv.seed) cfg.master_seed = *inv.seed;
  validate(cfg);
  return cfg;
}

namespace impl {

inline std::filesystem::path prepare_out(const Invocation& inv) {
  std::filesystem::path out(inv.out_dir);
  std::filesystem::create_directories(out);
  return out;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

inline void write_run(const std::filesystem::path& out, const RunReport& rep,
                      const std::string& format) {
  if (format == "json") {
    open_out(out / "records.json") << records_json(rep.records).dump(1) << '\n';
  } else {
    auto os = open_out(out / "records.csv");
    write_records_csv(os, rep.records);
  }
  open_out(out / "summary.json") << summary_json(rep).dump(2) << '\n';
  open_out(out / "config.txt") << config_to_text(rep.config);
}

inline void check_format(const std::string& f) {
  if (f != "csv" && f != "json")
    throw ConfigError("format", "format must be csv or json");
}

inline void print_summary(std::ostream& log, const RunReport& rep) {
  log << "realizations " << rep.config.realizations << ", workers "
      << rep.workers << ", " << rep.wall_seconds << " s\n";
  for (const auto& s : rep.summaries) {
    const auto& st = s.stats;
    log << method_name(s.method) << ": n_with_qos mean " << st.n_with_qos.mean
        << ", CUE loss p95 " << st.cue_sinr_loss_db.p95 << " dB, D2D SINR p5 "
        << st.d2d_sinr_db.p5 << " dB, SE mean " << st.se_total.mean
        << " (baseline " << st.se_baseline.mean << ")\n";
  }
}

}  // namespace impl

inline int cmd_simulate(const Invocation& inv, std::ostream& log) {
  impl::check_format(inv.format);
  const ScenarioConfig cfg = load_config(inv);
  const auto out = impl::prepare_out(inv);
  RunOptions opt;
  opt.keep_dac_history = inv.dump_dac_iterations;
  const RunReport rep = run(cfg, opt);
  impl::write_run(out, rep, inv.format);
  if (inv.dump_dac_iterations) {
    auto os = impl::open_out(out / "dac_iterations.csv");
    os << "realization,round,activity\n";
    for (std::size_t r = 0; r < rep.dac_history.size(); ++r)
      for (std::size_t it = 0; it < rep.dac_history[r].size(); ++it) {
        os << r << ',' << it + 1 << ',';
        for (auto a : rep.dac_history[r][it]) os << int(a);
        os << '\n';
      }
  }
  if (inv.dump_gains && cfg.realizations > 0) {
    const auto d = make_realization(
        cfg, build_layout(cfg.n_cells, cfg.cell_radius_m),
        ChannelParams::from_config(cfg), 0);
    auto os = impl::open_out(out / "gains_r0.csv");
    write_gain_table_csv(os, d.gains);
  }
  impl::print_summary(log, rep);
  return kExitOk;
}

inline int cmd_compare(const Invocation& inv, std::ostream& log) {
  impl::check_format(inv.format);
  const ScenarioConfig cfg = load_config(inv);
  const auto out = impl::prepare_out(inv);
  const RunReport rep = run(cfg);
  impl::write_run(out, rep, inv.format);
  for (const auto& s : rep.summaries)
    for (const auto& metric : cdf_metrics()) {
      auto os = impl::open_out(out / cdf_filename(s.method, metric));
      write_cdf_csv(os, cdf_samples(s, metric));
    }
  impl::print_summary(log, rep);
  return kExitOk;
}

inline Table sweep_table(const std::vector<RunReport>& reps,
                         const std::string& axis, const std::string& axis2,
                         Method m) {
  Table t;
  t.columns = {axis};
  if (!axis2.empty()) t.columns.push_back(axis2);
  for (const char* c :
       {"realizations", "n_with_qos_mean", "n_with_qos_p50", "n_active_mean",
        "cue_sinr_loss_p95_db", "d2d_sinr_p5_db", "cue_outage", "d2d_outage",
        "se_total_mean", "se_d2d_mean", "se_baseline_mean"})
    t.columns.push_back(c);
  for (const auto& rep : reps) {
    const MetricsSummary* s = rep.summary(m);
    if (!s) continue;
    const auto& st = s->stats;
    std::vector<double> row;
    const auto entries = config_entries(rep.config);
    auto value_of = [&](const std::string& a) {
      const std::string key = sweep_axis_key(a);
      for (const auto& [k, v] : entries)
        if (k == key) return d2d::detail::parse_double(k, v);
      return std::numeric_limits<double>::quiet_NaN();
    };
    row.push_back(value_of(axis));
    if (!axis2.empty()) row.push_back(value_of(axis2));
    for (double v :
         {static_cast<double>(st.realizations), st.n_with_qos.mean,
          st.n_with_qos.p50, st.n_active.mean, st.cue_sinr_loss_db.p95,
          st.d2d_sinr_db.p5, st.cue_outage, st.d2d_outage, st.se_total.mean,
          st.se_d2d.mean, st.se_baseline.mean})
      row.push_back(v);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline int cmd_sweep(const Invocation& inv, std::ostream& log) {
  if (inv.axis.empty()) throw ConfigError("axis", "sweep needs --axis");
  sweep_axis_key(inv.axis);
  if (!inv.axis2.empty()) sweep_axis_key(inv.axis2);
  const ScenarioConfig cfg = load_config(inv);
  const auto values = parse_values("values", inv.values);
  const auto out = impl::prepare_out(inv);
  std::vector<RunReport> reps;
  if (inv.axis2.empty()) {
    reps = sweep(cfg, inv.axis, values);
  } else {
    reps = sweep2(cfg, inv.axis, values, inv.axis2,
                  parse_values("values2", inv.values2));
  }
  for (Method m : cfg.methods) {
    auto os = impl::open_out(out / ("sweep_" + std::string(method_name(m)) +
                                      ".csv"));
    write_table_csv(os, kSweepSchema, sweep_table(reps, inv.axis, inv.axis2, m));
  }
  log << reps.size() << " sweep points written to " << out.string() << '\n';
  return kExitOk;
}

inline int cmd_bound(const Invocation& inv, std::ostream& log) {
  const ScenarioConfig cfg = load_config(inv);
  if (!(inv.prd_max_dbm > inv.prd_min_dbm) || inv.prd_points < 2)
    throw ConfigError("prd", "need prd-max > prd-min and at least 2 points");
  const auto out = impl::prepare_out(inv);
  const double area = cfg.cell_area();

  std::vector<double> prd_mw;
  Table curve{{"p_r_d_dbm", "n_c_ub_a", "n_d_ub_a"}, {}};
  for (int i = 0; i < inv.prd_points; ++i) {
    const double dbm = inv.prd_min_dbm + (inv.prd_max_dbm - inv.prd_min_dbm) *
                                             i / (inv.prd_points - 1);
    prd_mw.push_back(dbm_to_mw(dbm));
  }
  const auto bounds = bac_bound_curve(cfg, prd_mw);
  for (std::size_t i = 0; i < bounds.size(); ++i)
    curve.rows.push_back({mw_to_dbm(prd_mw[i]), bounds[i].n_c_ub * area,
                          bounds[i].n_d_ub * area});
  auto os = impl::open_out(out / "bound_prd.csv");
  write_table_csv(os, kBoundSchema, curve);

  const BacBounds design = scenario_bac_bounds(cfg);
  Table marker{{"p_hat_r_d_dbm", "n_ub_a"},
               {{mw_to_dbm(design.p_hat_r_d), design.n_ub * area}}};
  auto om = impl::open_out(out / "bound_design.csv");
  write_table_csv(om, kBoundSchema, marker);

  const auto deltas = parse_values("delta-values", inv.delta_values);
  Table by_delta{{"delta_db", "n_ub_a"}, {}};
  const auto nd = bac_count_sweep(cfg, "delta_db", deltas);
  for (std::size_t i = 0; i < deltas.size(); ++i)
    by_delta.rows.push_back({deltas[i], nd[i]});
  auto odl = impl::open_out(out / "bound_delta.csv");
  write_table_csv(odl, kBoundSchema, by_delta);

  const auto dmax = parse_values("d2d-max-values", inv.d2d_max_values);
  Table by_dmax{{"d2d_max_m", "n_ub_a"}, {}};
  const auto nm = bac_count_sweep(cfg, "d2d_max", dmax);
  for (std::size_t i = 0; i < dmax.size(); ++i)
    by_dmax.rows.push_back({dmax[i], nm[i]});
  auto odm = impl::open_out(out / "bound_d2d_max.csv");
  write_table_csv(odm, kBoundSchema, by_dmax);

  log << "design point: P_rD " << mw_to_dbm(design.p_hat_r_d)
      << " dBm, N_UB*A " << design.n_ub * area << '\n';
  return kExitOk;
}

inline nlohmann::json oac_json(const ScenarioConfig& cfg, int realization,
                               const OacSolution& sol,
                               const MilpInstance& inst) {
  nlohmann::json j;
  j["realization"] = realization;
  j["seed"] = realization_seed(cfg.master_seed, realization);
  j["n_pairs"] = inst.n_pairs();
  j["n_active"] = sol.active_set.size();
  j["proven_optimal"] = sol.outcome.proven_optimal;
  j["nodes"] = sol.outcome.nodes;
  j["milp_violation"] = sol.milp_violation;
  j["active"] = nlohmann::json::array();
  for (int r : sol.active_set)
    j["active"].push_back({{"cell", inst.cell_of[r]},
                           {"pair", inst.pair_index[r]},
                           {"power_mw", sol.powers[r]},
                           {"power_dbm", mw_to_dbm(sol.powers[r])}});
  return j;
}

inline int cmd_oac(const Invocation& inv, std::ostream& log) {
  const ScenarioConfig cfg = load_config(inv);
  const int guard = inv.max_pairs.value_or(cfg.oac_max_pairs);
  if (cfg.total_pairs() > guard)
    throw ConfigError("max-pairs", std::to_string(cfg.total_pairs()) +
                                       " pairs exceed the guard of " +
                                       std::to_string(guard));
  if (inv.realization < 0)
    throw ConfigError("realization", "must be >= 0");
  const auto out = impl::prepare_out(inv);
  const auto d = make_realization(cfg,
                                  build_layout(cfg.n_cells, cfg.cell_radius_m),
                                  ChannelParams::from_config(cfg),
                                  inv.realization);
  const auto inst = build_instance(d.gains, d.cellular, oac_params(cfg));
  const auto sol = solve_oac(inst, cfg.oac_node_budget);
  const auto j = oac_json(cfg, inv.realization, sol, inst);
  impl::open_out(out / "oac.json") << j.dump(2) << '\n';
  log << j.dump(2) << '\n';
  return kExitOk;
}

inline int dispatch(const Invocation& inv, std::ostream& log,
                    std::ostream& err) {
  try {
    if (inv.command == "simulate") return cmd_simulate(inv, log);
    if (inv.command == "compare") return cmd_compare(inv, log);
    if (inv.command == "sweep") return cmd_sweep(inv, log);
    if (inv.command == "bound") return cmd_bound(inv, log);
    if (inv.command == "oac") return cmd_oac(inv, log);
    err << "unknown command '" << inv.command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

inline int main_entry(int argc, const char* const* argv,
                      std::ostream& log = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"D2D underlay admission-control simulator"};
  app.require_subcommand(1);
  Invocation inv;

  auto common = [&](CLI::App* sc) {
    sc->add_option("-c,--config", inv.config_path, "key = value config file");
    sc->add_option("-o,--out", inv.out_dir, "output directory");
    sc->add_option("-s,--set", inv.overrides, "override, key=value")
        ->take_all();
    sc->add_option("--workers", inv.workers, "worker threads");
    sc->add_option("--seed", inv.seed, "master seed");
  };

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo run");
  common(sim);
  sim->add_option("--format", inv.format, "records format: csv or json");
  sim->add_flag("--dump-dac-iterations", inv.dump_dac_iterations,
                "write per-round DAC activity vectors");
  sim->add_flag("--dump-gains", inv.dump_gains,
                "write the gain table of realization 0");

  auto* cmp = app.add_subcommand("compare", "per-method CDF files");
  common(cmp);
  cmp->add_option("--format", inv.format, "records format: csv or json");

  auto* sw = app.add_subcommand("sweep", "sweep one or two parameters");
  common(sw);
  sw->add_option("--axis", inv.axis,
                 "delta_db, gamma_d_db, p_r_d or d2d_max")
      ->required();
  sw->add_option("--values", inv.values, "a,b,c or lo:step:hi")->required();
  sw->add_option("--axis2", inv.axis2, "second axis (grid)");
  sw->add_option("--values2", inv.values2, "values of the second axis");

  auto* bd = app.add_subcommand("bound", "BAC density bounds");
  common(bd);
  bd->add_option("--prd-min", inv.prd_min_dbm, "lowest P_rD (dBm)");
  bd->add_option("--prd-max", inv.prd_max_dbm, "highest P_rD (dBm)");
  bd->add_option("--prd-points", inv.prd_points, "points on the P_rD axis");
  bd->add_option("--delta-values", inv.delta_values, "delta sweep (dB)");
  bd->add_option("--d2d-max-values", inv.d2d_max_values,
                 "D2D max distance sweep (m)");

  auto* oac = app.add_subcommand("oac", "optimal admission on one drop");
  common(oac);
  oac->add_option("--max-pairs", inv.max_pairs, "refuse larger networks");
  oac->add_option("--realization", inv.realization, "realization index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  }
  for (auto* sc : app.get_subcommands()) inv.command = sc->get_name();
  return dispatch(inv, log, err);
}

}  // namespace d2d::cli
