#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "d2d/bac.hpp"
#include "d2d/cellular.hpp"
#include "d2d/channel.hpp"
#include "d2d/dac.hpp"
#include "d2d/geometry.hpp"
#include "d2d/metrics.hpp"
#include "d2d/oac.hpp"
#include "d2d/random.hpp"
#include "d2d/scenario.hpp"
#include "d2d/statmodel.hpp"

namespace d2d {

inline constexpr const char* kWorkersEnv = "D2D_WORKERS";

inline int resolve_workers(const ScenarioConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv(kWorkersEnv)) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Seed of realization r: one SplitMix64-based mix of the master seed.
inline std::uint64_t realization_seed(std::uint64_t master, int r) {
  return derive_seed(master, static_cast<std::uint64_t>(r));
}

/// BAC bounds for a configuration, at the design point unless the config
/// pins the received power.
inline BacBounds scenario_bac_bounds(const ScenarioConfig& cfg,
                                     std::optional<double> p_r_d_mw = {}) {
  const auto ctx = ExpectationContext::from_config(cfg);
  const double gamma_cue = db_to_linear(cfg.gamma_cue_th_db);
  const double e_bs = expected_cue_interference_at_bs(ctx, cfg.cell_area(),
                                                      cfg.alpha_p, gamma_cue);
  const double e_d = expected_cue_interference_at_d2d(ctx, cfg.cell_area(),
                                                      cfg.alpha_p, gamma_cue);
  const auto dp =
      bac_design_point(ctx, cfg.delta(), cfg.gamma_d(), e_bs, e_d);
  double p = dp.p_hat_r_d;
  if (p_r_d_mw) {
    p = *p_r_d_mw;
  } else if (!std::isnan(cfg.bac_p_r_d_dbm)) {
    p = dbm_to_mw(cfg.bac_p_r_d_dbm);
  }
  return bac_bounds(ctx, cfg.delta(), cfg.gamma_d(), p, e_bs, e_d);
}

/// BAC bound curves against received power (mW).
inline std::vector<BacBounds> bac_bound_curve(const ScenarioConfig& cfg,
                                              const std::vector<double>& p_r_d_mw) {
  std::vector<BacBounds> out;
  for (double p : p_r_d_mw) out.push_back(scenario_bac_bounds(cfg, p));
  return out;
}

/// Design-point link count per cell (N^UB * A_cl) along a sweep axis.
inline std::vector<double> bac_count_sweep(const ScenarioConfig& cfg,
                                           const std::string& axis,
                                           const std::vector<double>& values);

/// Everything one realization produces.
struct RealizationData {
  NetworkRealization real;
  GainTable gains;
  CellularState cellular;
};

inline RealizationData make_realization(const ScenarioConfig& cfg,
                                        const CellLayout& layout,
                                        const ChannelParams& params, int r) {
  const std::uint64_t seed = realization_seed(cfg.master_seed, r);
  RealizationData d;
  d.real = drop_users(layout, cfg, derive_seed(seed, Stream::kGeometry));
  d.real.realization_seed = seed;
  d.gains = build_gain_table(d.real, params, derive_seed(seed, Stream::kChannel));
  d.cellular = make_cellular_state(d.gains, cfg);
  return d;
}

inline OacParams oac_params(const ScenarioConfig& cfg) {
  return {cfg.p_d_max_mw(), cfg.p_c_max_mw(), cfg.noise_mw(), cfg.noise_mw()};
}

struct RunOptions {
  bool keep_dac_history = false;
};

struct RunReport {
  ScenarioConfig config;
  /// Realization-major; within a realization, the order of config.methods.
  std::vector<MetricsRecord> records;
  std::vector<MetricsSummary> summaries;  // one per method
  BacBounds bac;
  int workers = 1;
  double wall_seconds = 0.0;
  /// realization -> per-round flattened activity (only when requested).
  std::vector<std::vector<std::vector<std::uint8_t>>> dac_history;

  const MetricsSummary* summary(Method m) const {
    for (const auto& s : summaries)
      if (s.method == m) return &s;
    return nullptr;
  }
};

/// Monte-Carlo run. Every enabled method sees the same drop and gain table
/// of each realization; realization r is seeded from (master_seed, r) only,
/// so results do not depend on the number of workers.
inline RunReport run(const ScenarioConfig& cfg, const RunOptions& opt = {}) {
  validate(cfg);
  if (cfg.has_method(Method::kOac) && cfg.total_pairs() > cfg.oac_max_pairs)
    throw ConfigError("oac_max_pairs",
                      "OAC enabled with " + std::to_string(cfg.total_pairs()) +
                          " pairs; guard oac_max_pairs = " +
                          std::to_string(cfg.oac_max_pairs));
  const auto t0 = std::chrono::steady_clock::now();

  RunReport rep;
  rep.config = cfg;
  rep.workers = resolve_workers(cfg);
  const CellLayout layout = build_layout(cfg.n_cells, cfg.cell_radius_m);
  const ChannelParams params = ChannelParams::from_config(cfg);
  const auto ctx = ExpectationContext::from_config(cfg);
  rep.bac = scenario_bac_bounds(cfg);
  const DacModel dac_model = DacModel::from_config(cfg, ctx);
  const DacOptions dac_opt{cfg.dac_max_iters, cfg.dac_sequential,
                           opt.keep_dac_history};
  const double noise = cfg.noise_mw();

  const int n = cfg.realizations;
  std::vector<std::vector<MetricsRecord>> per_real(n);
  if (opt.keep_dac_history) rep.dac_history.resize(n);

  auto work = [&](int r) {
    const RealizationData d = make_realization(cfg, layout, params, r);
    const std::uint64_t seed = d.real.realization_seed;
    for (Method m : cfg.methods) {
      AdmissionOutcome out;
      switch (m) {
        case Method::kBac:
          out = bac_admit(d.real, rep.bac, d.gains, cfg.p_d_max_mw(),
                          derive_seed(seed, Stream::kBacSelection),
                          cfg.bac_clamp);
          break;
        case Method::kDac:
          out = dac_round(d.real, d.gains, d.cellular, dac_model, dac_opt,
                          derive_seed(seed, Stream::kDacOrder));
          if (opt.keep_dac_history) rep.dac_history[r] = out.history;
          break;
        case Method::kOac: {
          if (r >= cfg.oac_realizations) continue;
          const auto inst = build_instance(d.gains, d.cellular, oac_params(cfg));
          out = solve_oac(inst, cfg.oac_node_budget).outcome;
          break;
        }
      }
      MetricsRecord rec = record(d.real, d.gains, out, d.cellular, noise, noise);
      rec.method = m;
      rec.realization = r;
      per_real[r].push_back(std::move(rec));
    }
  };

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int r = next++; r < n; r = next++) {
      try {
        work(r);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int nw = std::min(rep.workers, std::max(n, 1));
  if (nw <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& v : per_real)
    for (auto& rec : v) rep.records.push_back(std::move(rec));
  for (Method m : cfg.methods)
    rep.summaries.push_back(
        summarize(rep.records, m, cfg.delta_db, cfg.gamma_d_db));
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return rep;
}

/// Config key driven by a sweep axis name.
inline std::string sweep_axis_key(const std::string& axis) {
  if (axis == "delta_db") return "delta_db";
  if (axis == "gamma_d_db") return "gamma_d_db";
  if (axis == "p_r_d") return "bac_p_r_d_dbm";
  if (axis == "d2d_max") return "d2d_max_m";
  throw ConfigError(axis, "unknown sweep axis '" + axis +
                              "' (expected delta_db, gamma_d_db, p_r_d, "
                              "d2d_max)");
}

inline void apply_axis(ScenarioConfig& cfg, const std::string& axis,
                       double value) {
  set_config_value(cfg, sweep_axis_key(axis), detail::format_double(value));
}

/// One report per value; all points share the master seed, hence the drops.
inline std::vector<RunReport> sweep(const ScenarioConfig& cfg,
                                    const std::string& axis,
                                    const std::vector<double>& values,
                                    const RunOptions& opt = {}) {
  sweep_axis_key(axis);
  std::vector<RunReport> out;
  for (double v : values) {
    ScenarioConfig c = cfg;
    apply_axis(c, axis, v);
    out.push_back(run(c, opt));
  }
  return out;
}

/// Full grid over two axes, first axis outermost.
inline std::vector<RunReport> sweep2(const ScenarioConfig& cfg,
                                     const std::string& axis1,
                                     const std::vector<double>& values1,
                                     const std::string& axis2,
                                     const std::vector<double>& values2,
                                     const RunOptions& opt = {}) {
  sweep_axis_key(axis1);
  sweep_axis_key(axis2);
  std::vector<RunReport> out;
  for (double v1 : values1)
    for (double v2 : values2) {
      ScenarioConfig c = cfg;
      apply_axis(c, axis1, v1);
      apply_axis(c, axis2, v2);
      out.push_back(run(c, opt));
    }
  return out;
}

inline std::vector<double> bac_count_sweep(const ScenarioConfig& cfg,
                                           const std::string& axis,
                                           const std::vector<double>& values) {
  std::vector<double> out;
  for (double v : values) {
    ScenarioConfig c = cfg;
    apply_axis(c, axis, v);
    validate(c);
    out.push_back(scenario_bac_bounds(c).n_ub * c.cell_area());
  }
  return out;
}

}  // namespace d2d
