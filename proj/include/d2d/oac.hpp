#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "d2d/cellular.hpp"
#include "d2d/channel.hpp"
#include "d2d/outcome.hpp"

// Optimal admission control: maximise the number of active D2D pairs subject
// to exact CUE and D2D SINR constraints and the D2D power cap.
//
// Feasibility of a fixed activity set is decided by the componentwise least
// power vector meeting every active pair's SINR target (monotone fixed-point
// iteration from zero). CUE rows and caps are monotone in the powers, so
// checking them at that vector is exact, and infeasibility is inherited by
// every superset. The search enumerates sets in lexicographic order of their
// sorted index lists and prunes infeasible prefixes.

namespace d2d {

struct OacParams {
  double p_d_max = 0.0;    // mW
  double p_c_max = 0.0;    // mW
  double noise_bs = 0.0;   // mW
  double noise_d2d = 0.0;  // mW
};

/// Linearised (big-M) problem data. Pairs are flattened cell-major,
/// pair-minor; index r refers to pair pair_index[r] of cell cell_of[r].
struct MilpInstance {
  std::vector<int> pairs_per_cell;
  std::vector<int> cell_of;
  std::vector<int> pair_index;

  double gamma_d = 1.0;
  OacParams params;
  std::vector<double> cue_powers;      // mW per cell
  std::vector<double> gamma_cue_th;    // linear per cell

  // A^C[x][i]: G_x0x0 / gamma_x0^th on the diagonal, -G_i0x0 elsewhere.
  std::vector<std::vector<double>> a_c;
  // Gain from pair s's transmitter to BS x: [s][x].
  std::vector<std::vector<double>> g_pair_bs;
  // A^D[r][s]: -G_rr on the diagonal, gamma_d * G_sr elsewhere (row r).
  std::vector<std::vector<double>> a_d;
  std::vector<double> b_d;  // B_r
  std::vector<double> m;    // M_r

  // Raw terms reused by the feasibility oracle.
  std::vector<double> intra;          // G_rr
  std::vector<std::vector<double>> g_cross;  // [s][r]: pair s tx -> pair r rx
  std::vector<double> cue_at_pair;    // sum_i P_i0 G_i0r

  int n_pairs() const { return static_cast<int>(cell_of.size()); }
  int n_cells() const { return static_cast<int>(pairs_per_cell.size()); }

  /// Right-hand side of CUE row x: sum_i P_i0 A^C_ix0 - N_BS.
  double cue_row_rhs(int x) const {
    double s = -params.noise_bs;
    for (int i = 0; i < n_cells(); ++i) s += cue_powers[i] * a_c[x][i];
    return s;
  }
};

inline MilpInstance build_instance(const GainTable& g, const CellularState& cs,
                                   const OacParams& params) {
  MilpInstance inst;
  inst.pairs_per_cell = g.pairs_per_cell();
  inst.gamma_d = cs.gamma_d;
  inst.params = params;
  inst.cue_powers = cs.cue_tx_power;
  const int nc = g.n_cells();
  for (int x = 0; x < nc; ++x) {
    inst.gamma_cue_th.push_back(cs.cue_sinr_target(x));
    for (int k = 0; k < g.n_pairs(x); ++k) {
      inst.cell_of.push_back(x);
      inst.pair_index.push_back(k);
    }
  }
  const int n = inst.n_pairs();

  inst.a_c.assign(nc, std::vector<double>(nc, 0.0));
  for (int x = 0; x < nc; ++x)
    for (int i = 0; i < nc; ++i)
      inst.a_c[x][i] = i == x ? g(x, 0, x, 0) / inst.gamma_cue_th[x]
                              : -g(i, 0, x, 0);

  inst.g_pair_bs.assign(n, std::vector<double>(nc, 0.0));
  inst.g_cross.assign(n, std::vector<double>(n, 0.0));
  inst.intra.resize(n);
  inst.cue_at_pair.assign(n, 0.0);
  for (int s = 0; s < n; ++s) {
    const int a = inst.cell_of[s], b = inst.pair_index[s] + 1;
    for (int x = 0; x < nc; ++x) inst.g_pair_bs[s][x] = g(a, b, x, 0);
    for (int r = 0; r < n; ++r)
      inst.g_cross[s][r] = g(a, b, inst.cell_of[r], inst.pair_index[r] + 1);
    inst.intra[s] = inst.g_cross[s][s];
  }

  inst.a_d.assign(n, std::vector<double>(n, 0.0));
  inst.b_d.resize(n);
  inst.m.resize(n);
  for (int r = 0; r < n; ++r) {
    const int x = inst.cell_of[r], k = inst.pair_index[r] + 1;
    double all_pairs = 0.0, cue_max = 0.0, cue = 0.0;
    for (int s = 0; s < n; ++s) {
      all_pairs += inst.g_cross[s][r];
      inst.a_d[r][s] = s == r ? -inst.intra[r] : inst.gamma_d * inst.g_cross[s][r];
    }
    for (int i = 0; i < nc; ++i) {
      cue_max += g(i, 0, x, k);
      cue += inst.cue_powers[i] * g(i, 0, x, k);
    }
    inst.cue_at_pair[r] = cue;
    inst.m[r] = inst.gamma_d * (params.p_d_max * (all_pairs - inst.intra[r]) +
                                params.p_c_max * cue_max + params.noise_d2d);
    inst.b_d[r] = inst.m[r] - inst.gamma_d * (cue + params.noise_d2d);
  }
  return inst;
}

/// Largest relative violation of the linearised constraints at (phi, P~).
/// Zero or negative means every row holds.
inline double milp_violation(const MilpInstance& inst,
                             const std::vector<std::uint8_t>& phi,
                             const std::vector<double>& p) {
  double worst = -1.0;
  for (int x = 0; x < inst.n_cells(); ++x) {
    double lhs = 0.0, scale = inst.params.noise_bs;
    for (int s = 0; s < inst.n_pairs(); ++s) lhs += p[s] * inst.g_pair_bs[s][x];
    for (int i = 0; i < inst.n_cells(); ++i)
      scale += std::abs(inst.cue_powers[i] * inst.a_c[x][i]);
    worst = std::max(worst, (lhs - inst.cue_row_rhs(x)) / scale);
  }
  for (int r = 0; r < inst.n_pairs(); ++r) {
    double lhs = phi[r] ? inst.m[r] : 0.0, scale = inst.m[r];
    for (int s = 0; s < inst.n_pairs(); ++s) {
      lhs += p[s] * inst.a_d[r][s];
      scale += std::abs(p[s] * inst.a_d[r][s]);
    }
    worst = std::max(worst, (lhs - inst.b_d[r]) / scale);
    worst = std::max(worst, (p[r] - inst.params.p_d_max) / inst.params.p_d_max);
    if (!phi[r] && p[r] != 0.0) worst = std::max(worst, 1.0);
  }
  return worst;
}

struct FeasibilityResult {
  bool feasible = false;
  /// Flat power vector (mW) over all pairs; zero outside the active set.
  std::vector<double> powers;
  int iterations = 0;
};

inline constexpr int kOracleMaxIters = 10'000;
inline constexpr double kOracleTolerance = 1e-10;

/// Least power vector meeting every active pair's D2D SINR target, checked
/// against the power cap and every CUE row. `active` holds flat indices.
inline FeasibilityResult min_power_feasible(const std::vector<int>& active,
                                            const MilpInstance& inst) {
  FeasibilityResult res;
  res.powers.assign(inst.n_pairs(), 0.0);
  if (active.empty()) {
    res.feasible = true;
    return res;
  }
  const int n = static_cast<int>(active.size());
  const double gamma = inst.gamma_d;
  const double cap = inst.params.p_d_max;
  std::vector<double> base(n);
  for (int k = 0; k < n; ++k) {
    const int r = active[k];
    base[k] = gamma * (inst.cue_at_pair[r] + inst.params.noise_d2d) /
              inst.intra[r];
  }
  // Interference at r from the other active transmitters.
  auto interference = [&](const std::vector<double>& p, int k) {
    const int r = active[k];
    double s = 0.0;
    for (int l = 0; l < n; ++l)
      if (l != k) s += p[l] * inst.g_cross[active[l]][r];
    return s;
  };

  std::vector<double> p(n, 0.0), next(n);
  bool converged = false;
  for (int it = 0; it < kOracleMaxIters && !converged; ++it) {
    res.iterations = it + 1;
    double change = 0.0;
    for (int k = 0; k < n; ++k) {
      next[k] = base[k] + gamma * interference(p, k) / inst.intra[active[k]];
      if (next[k] > cap) return res;
      change = std::max(change, (next[k] - p[k]) / next[k]);
    }
    p.swap(next);
    converged = change < kOracleTolerance;
  }
  if (!converged) return res;

  // The iterate approaches the fixed point from below; inflate slightly so
  // every SINR target holds without rounding shortfall.
  std::vector<double> q(n);
  for (double margin = 1e-9;; margin *= 10) {
    if (margin > 1e-5) return res;
    for (int k = 0; k < n; ++k) q[k] = p[k] * (1.0 + margin);
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      const int r = active[k];
      const double sinr = q[k] * inst.intra[r] /
                          (interference(q, k) + inst.cue_at_pair[r] +
                           inst.params.noise_d2d);
      ok = sinr >= gamma;
    }
    if (ok) break;
  }
  for (int k = 0; k < n; ++k) {
    if (q[k] > cap) return res;
    res.powers[active[k]] = q[k];
  }
  for (int x = 0; x < inst.n_cells(); ++x) {
    double lhs = 0.0;
    for (int k = 0; k < n; ++k) lhs += q[k] * inst.g_pair_bs[active[k]][x];
    if (lhs > inst.cue_row_rhs(x)) {
      std::fill(res.powers.begin(), res.powers.end(), 0.0);
      return res;
    }
  }
  res.feasible = true;
  return res;
}

struct OacSolution {
  AdmissionOutcome outcome;
  std::vector<int> active_set;  // flat indices, ascending
  std::vector<double> powers;   // flat, mW
  double milp_violation = 0.0;
};

/// Maximum-cardinality feasible activity set. Among optima the
/// lexicographically smallest sorted index list wins, so lower cells and
/// lower pair indices are preferred. `node_budget` bounds the number of
/// feasibility checks; when it runs out the best set found so far is
/// returned with proven_optimal = false.
inline OacSolution solve_oac(const MilpInstance& inst,
                             std::uint64_t node_budget) {
  const int n = inst.n_pairs();
  std::uint64_t nodes = 0;
  bool exhausted = false;

  std::vector<int> best;
  std::vector<double> best_powers(n, 0.0);
  std::vector<int> cur;
  std::vector<int> singles;
  for (int r = 0; r < n && !exhausted; ++r) {
    if (nodes >= node_budget) {
      exhausted = true;
      break;
    }
    ++nodes;
    const auto f = min_power_feasible({r}, inst);
    if (!f.feasible) continue;
    singles.push_back(r);
    if (best.empty()) {
      best = {r};
      best_powers = f.powers;
    }
  }

  const int nc = static_cast<int>(singles.size());
  std::function<void(int)> dfs = [&](int start) {
    for (int idx = start; idx < nc && !exhausted; ++idx) {
      if (static_cast<int>(cur.size()) + (nc - idx) <=
          static_cast<int>(best.size()))
        return;
      cur.push_back(singles[idx]);
      if (cur.size() == 1) {
        dfs(idx + 1);
      } else if (nodes >= node_budget) {
        exhausted = true;
      } else {
        ++nodes;
        const auto f = min_power_feasible(cur, inst);
        if (f.feasible) {
          if (cur.size() > best.size()) {
            best = cur;
            best_powers = f.powers;
          }
          dfs(idx + 1);
        }
      }
      cur.pop_back();
    }
  };
  if (!exhausted) dfs(0);

  OacSolution sol;
  sol.outcome = AdmissionOutcome::none(inst.pairs_per_cell);
  sol.outcome.nodes = nodes;
  sol.outcome.proven_optimal = !exhausted;
  sol.active_set = best;
  sol.powers = best_powers;
  std::vector<std::uint8_t> phi(n, 0);
  for (int r : best) {
    phi[r] = 1;
    sol.outcome.active[inst.cell_of[r]][inst.pair_index[r]] = 1;
    sol.outcome.power[inst.cell_of[r]][inst.pair_index[r]] = best_powers[r];
  }
  sol.milp_violation = milp_violation(inst, phi, best_powers);
  if (sol.milp_violation > 1e-8)
    throw std::logic_error("solve_oac: solution violates the big-M model");
  return sol;
}

}  // namespace d2d
