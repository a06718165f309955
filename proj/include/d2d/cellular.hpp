#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "d2d/channel.hpp"
#include "d2d/outcome.hpp"
#include "d2d/scenario.hpp"
#include "d2d/units.hpp"

namespace d2d {

/// Open-loop fractional power control in the dB domain:
///   P = alpha_p (gamma_th + N_BS) + (1 - alpha_p) P_max - alpha_p G_dB,
/// capped at P_max. Returns mW.
inline double ofpc_power(double gain_to_bs, double alpha_p,
                         double gamma_cue_th_db, double noise_bs_dbm,
                         double p_c_max_dbm) {
  if (!(alpha_p >= 0 && alpha_p <= 1))
    throw std::invalid_argument("alpha_p must be in [0, 1]");
  const double p0 = alpha_p * (gamma_cue_th_db + noise_bs_dbm) +
                    (1.0 - alpha_p) * p_c_max_dbm;
  const double p_dbm = p0 - alpha_p * linear_to_db(gain_to_bs);
  return dbm_to_mw(std::min(p_dbm, p_c_max_dbm));
}

/// The primary network before any D2D link is admitted.
struct CellularState {
  std::vector<double> cue_tx_power;   // mW, per cell
  std::vector<double> baseline_sinr;  // linear, per cell, all D2D silent
  double delta = 1.0;                 // tolerated SINR loss, linear
  double gamma_d = 1.0;               // D2D SINR target, linear

  /// CUE SINR target gamma_x0^th = baseline / delta.
  double cue_sinr_target(int cell) const {
    return baseline_sinr[cell] / delta;
  }
};

struct InterferenceTerms {
  std::vector<double> bs_from_d2d;                // I_x0^D2D
  std::vector<double> bs_from_cue;                // I_x0^CUE
  std::vector<std::vector<double>> pair_from_d2d; // I_xk^D2D
  std::vector<std::vector<double>> pair_from_cue; // I_xk^CUE
};

/// Exact interference sums at every BS and D2D receiver. A pair never
/// interferes with itself and a CUE never interferes with its own BS.
inline InterferenceTerms realized_interference(
    const GainTable& g, const AdmissionOutcome& outcome,
    const std::vector<double>& cue_powers) {
  const int n = g.n_cells();
  InterferenceTerms t;
  t.bs_from_d2d.assign(n, 0.0);
  t.bs_from_cue.assign(n, 0.0);
  t.pair_from_d2d.resize(n);
  t.pair_from_cue.resize(n);
  for (int x = 0; x < n; ++x) {
    t.pair_from_d2d[x].assign(g.n_pairs(x), 0.0);
    t.pair_from_cue[x].assign(g.n_pairs(x), 0.0);
  }
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < n; ++i) {
      if (i != x) t.bs_from_cue[x] += cue_powers[i] * g(i, 0, x, 0);
      for (int j = 0; j < g.n_pairs(i); ++j)
        if (outcome.active[i][j])
          t.bs_from_d2d[x] += outcome.power[i][j] * g(i, j + 1, x, 0);
    }
    for (int k = 0; k < g.n_pairs(x); ++k) {
      double d2d = 0.0, cue = 0.0;
      for (int i = 0; i < n; ++i) {
        cue += cue_powers[i] * g(i, 0, x, k + 1);
        for (int j = 0; j < g.n_pairs(i); ++j) {
          if (!outcome.active[i][j] || (i == x && j == k)) continue;
          d2d += outcome.power[i][j] * g(i, j + 1, x, k + 1);
        }
      }
      t.pair_from_d2d[x][k] = d2d;
      t.pair_from_cue[x][k] = cue;
    }
  }
  return t;
}

struct SinrReport {
  std::vector<double> cue;                              // Gamma_x0
  std::vector<std::vector<std::optional<double>>> pair; // Gamma_xk, active only
};

inline SinrReport realized_sinrs(const GainTable& g,
                                 const AdmissionOutcome& outcome,
                                 const std::vector<double>& cue_powers,
                                 double noise_bs, double noise_d2d) {
  const InterferenceTerms t = realized_interference(g, outcome, cue_powers);
  SinrReport r;
  const int n = g.n_cells();
  r.cue.resize(n);
  r.pair.resize(n);
  for (int x = 0; x < n; ++x) {
    r.cue[x] = cue_powers[x] * g(x, 0, x, 0) /
               (t.bs_from_d2d[x] + t.bs_from_cue[x] + noise_bs);
    r.pair[x].assign(g.n_pairs(x), std::nullopt);
    for (int k = 0; k < g.n_pairs(x); ++k) {
      if (!outcome.active[x][k]) continue;
      r.pair[x][k] = outcome.power[x][k] * g.intra(x, k) /
                     (t.pair_from_d2d[x][k] + t.pair_from_cue[x][k] + noise_d2d);
    }
  }
  return r;
}

/// OFPC powers for every CUE and the SINR each CUE sees with all D2D silent.
inline CellularState make_cellular_state(const GainTable& g,
                                         const ScenarioConfig& cfg) {
  CellularState s;
  s.delta = cfg.delta();
  s.gamma_d = cfg.gamma_d();
  const int n = g.n_cells();
  for (int x = 0; x < n; ++x)
    s.cue_tx_power.push_back(ofpc_power(g.cue_ofpc_gain(x, cfg.ofpc_shadowing),
                                        cfg.alpha_p, cfg.gamma_cue_th_db,
                                        cfg.noise_dbm(), cfg.p_c_max_dbm));
  const auto silent = AdmissionOutcome::none(g.pairs_per_cell());
  s.baseline_sinr = realized_sinrs(g, silent, s.cue_tx_power, cfg.noise_mw(),
                                   cfg.noise_mw())
                        .cue;
  return s;
}

}  // namespace d2d
