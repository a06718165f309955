#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "d2d/cellular.hpp"
#include "d2d/channel.hpp"
#include "d2d/geometry.hpp"
#include "d2d/outcome.hpp"
#include "d2d/random.hpp"
#include "d2d/statmodel.hpp"

// Distributed admission control. Each BS broadcasts a handful of scalars
// (tolerable interference, active counts per cell and per sector); each pair
// derives a power upper bound that protects its CUE and a lower bound that
// meets its own SINR target, and turns on iff the interval is non-empty.

namespace d2d {

inline constexpr int kSectorsPerCell = 3;

/// 120-degree wedges anchored at each BS; wedge s spans [120s, 120(s+1))
/// degrees. Sector (cell x, wedge s) has index 3x + s.
struct SectorMap {
  std::vector<Point> bs;
  std::vector<Point> centroids;
  double sector_area = 0.0;

  int n_sectors() const { return static_cast<int>(centroids.size()); }

  int sector_of(int cell, const Point& p) const {
    double a = std::atan2(p.y - bs[cell].y, p.x - bs[cell].x);
    if (a < 0) a += 2.0 * kPi;
    int s = static_cast<int>(a / (2.0 * kPi / kSectorsPerCell));
    s = std::clamp(s, 0, kSectorsPerCell - 1);
    return cell * kSectorsPerCell + s;
  }
};

/// Sector centroids are placed at 2R/3 from the BS on each wedge bisector.
inline SectorMap make_sector_map(const CellLayout& layout) {
  SectorMap m;
  m.bs = layout.cell_centers;
  m.sector_area = layout.cell_area() / kSectorsPerCell;
  const double r = 2.0 * layout.cell_radius / 3.0;
  for (const Point& c : layout.cell_centers)
    for (int s = 0; s < kSectorsPerCell; ++s) {
      const double a = (s + 0.5) * 2.0 * kPi / kSectorsPerCell;
      m.centroids.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
  return m;
}

/// Active-link count and area of the three sectors nearest a receiver.
struct SectorDensity {
  double count = 0.0;  // N_xd
  double area = 0.0;   // A_dk
};

inline SectorDensity sector_density(const Point& rx, const SectorMap& sectors,
                                    const std::vector<int>& sector_counts) {
  std::vector<int> idx(sectors.n_sectors());
  std::iota(idx.begin(), idx.end(), 0);
  const int take = std::min<int>(kSectorsPerCell, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                    [&](int a, int b) {
                      const double da = distance(rx, sectors.centroids[a]);
                      const double db = distance(rx, sectors.centroids[b]);
                      return da < db || (da == db && a < b);
                    });
  SectorDensity d;
  for (int s = 0; s < take; ++s) {
    d.count += sector_counts[idx[s]];
    d.area += sectors.sector_area;
  }
  return d;
}

/// Scenario-wide statistical quantities shared by every BS and pair.
struct DacModel {
  double delta = 1.0;
  double gamma_d = 1.0;
  double p_d_max = 0.0;
  double noise_bs = 0.0;
  double noise_d2d = 0.0;
  double e_p_tx_cue = 0.0;
  double e_i_cue_bs = 0.0;   // E[I_x0^CUE]
  double e_i_cue_d2d = 0.0;  // E[I_xk^CUE]
  double e_g_d2d_bs = 0.0;
  double e_g_d2d_i = 0.0;
  double area_x0 = 0.0;      // BS interference area w.r.t. D2D transmitters
  double area_xk = 0.0;      // D2D interference area w.r.t. D2D transmitters
  double area_xk_c = 0.0;    // D2D interference area w.r.t. CUEs

  static DacModel from_config(const ScenarioConfig& cfg,
                              const ExpectationContext& ctx) {
    DacModel m;
    const double gamma_cue = db_to_linear(cfg.gamma_cue_th_db);
    m.delta = cfg.delta();
    m.gamma_d = cfg.gamma_d();
    m.p_d_max = ctx.p_d_max;
    m.noise_bs = ctx.noise_bs;
    m.noise_d2d = ctx.noise_d2d;
    m.e_p_tx_cue = expected_cue_tx_power(ctx, cfg.alpha_p, gamma_cue,
                                         ctx.cell_radius, ctx.cue_bs_in.min);
    m.e_i_cue_bs = expected_cue_interference_at_bs(ctx, cfg.cell_area(),
                                                   cfg.alpha_p, gamma_cue);
    m.e_i_cue_d2d = expected_cue_interference_at_d2d(ctx, cfg.cell_area(),
                                                     cfg.alpha_p, gamma_cue);
    m.e_g_d2d_bs = ctx.e_g_d2d_bs();
    m.e_g_d2d_i = ctx.e_g_d2d_i();
    m.area_x0 = ctx.area_d2d_bs();
    m.area_xk = ctx.area_d2d_i();
    m.area_xk_c = ctx.area_cue_d();
    return m;
  }
};

/// What BS_x broadcasts. Fixed size regardless of how many pairs it serves.
struct BroadcastParams {
  int active_count = 0;
  std::array<int, kSectorsPerCell> sector_counts{};
  double i_th_hat = 0.0;  // interference D2D links may add at BS_x (mW)
  double e_p_tx_cue = 0.0;
  double cell_area = 0.0;
  double e_g_d2d_bs = 0.0;
  double e_g_d2d_i = 0.0;
  double area_x0 = 0.0;
  double area_xk = 0.0;
  double area_xk_c = 0.0;
};

/// I_x0^th = delta P_x0 G_x0x0 / Gamma_x0^i; the broadcast budget subtracts
/// the expected inter-cell CUE interference and noise and may be negative.
inline BroadcastParams bs_broadcast(
    int cell, int active_count,
    const std::array<int, kSectorsPerCell>& sector_counts, const GainTable& g,
    const CellularState& cs, const DacModel& m, double cell_area) {
  BroadcastParams bp;
  bp.active_count = active_count;
  bp.sector_counts = sector_counts;
  const double i_th =
      cs.delta * cs.cue_tx_power[cell] * g(cell, 0, cell, 0) /
      cs.baseline_sinr[cell];
  bp.i_th_hat = i_th - m.e_i_cue_bs - m.noise_bs;
  bp.e_p_tx_cue = m.e_p_tx_cue;
  bp.cell_area = cell_area;
  bp.e_g_d2d_bs = m.e_g_d2d_bs;
  bp.e_g_d2d_i = m.e_g_d2d_i;
  bp.area_x0 = m.area_x0;
  bp.area_xk = m.area_xk;
  bp.area_xk_c = m.area_xk_c;
  return bp;
}

/// P_UB = min(I_th_hat / (G_xkx0 + N_x / A_cl * A_x0 * E[G_D2D-BS]), P_max),
/// or 0 when the budget is exhausted.
inline double pair_upper_bound(double gain_to_bs, const BroadcastParams& bp,
                               double p_d_max) {
  if (bp.i_th_hat <= 0) return 0.0;
  const double denom = gain_to_bs + bp.active_count / bp.cell_area *
                                        bp.area_x0 * bp.e_g_d2d_bs;
  return std::min(bp.i_th_hat / denom, p_d_max);
}

/// P_LB = (E[I_xk^CUE] + N_D) gamma_D /
///        (G_xkxk - gamma_D N_xd / A_dk * A_xk * E[G_D2D-I]).
/// Empty when the denominator is not positive: no power reaches gamma_D.
inline std::optional<double> pair_lower_bound(double intra_gain,
                                              const SectorDensity& sd,
                                              const BroadcastParams& bp,
                                              double gamma_d,
                                              double e_i_cue_d2d,
                                              double noise_d2d) {
  const double density = sd.area > 0 ? sd.count / sd.area : 0.0;
  const double denom =
      intra_gain - gamma_d * density * bp.area_xk * bp.e_g_d2d_i;
  if (!(denom > 0)) return std::nullopt;
  return (e_i_cue_d2d + noise_d2d) * gamma_d / denom;
}

struct PairDecision {
  double p_ub = 0.0;
  std::optional<double> p_lb;
  bool phi = false;
  double p_tx = 0.0;
};

inline PairDecision dac_decide(std::optional<double> p_lb, double p_ub) {
  PairDecision d;
  d.p_ub = p_ub;
  d.p_lb = p_lb;
  if (p_lb && *p_lb > 0 && *p_lb <= p_ub) {
    d.phi = true;
    d.p_tx = *p_lb;
  }
  return d;
}

struct DacOptions {
  int max_iters = 10;
  bool sequential = true;
  bool record_history = false;
};

/// Repeated decision rounds until the activity vector stops changing or
/// max_iters rounds ran. Pairs decide in a fresh seeded random order each
/// round. In sequential mode the BS counts follow every decision; otherwise
/// all pairs of a round read the same snapshot. A deciding pair never counts
/// itself among the active links.
inline AdmissionOutcome dac_round(const NetworkRealization& real,
                                  const GainTable& g, const CellularState& cs,
                                  const DacModel& m, const DacOptions& opt,
                                  std::uint64_t seed) {
  const SectorMap sectors = make_sector_map(real.layout);
  const double cell_area = real.layout.cell_area();
  auto out = AdmissionOutcome::none(g.pairs_per_cell());
  out.converged = false;

  struct PairRef {
    int cell, k, sector;
  };
  std::vector<PairRef> pairs;
  for (int x = 0; x < g.n_cells(); ++x)
    for (int k = 0; k < g.n_pairs(x); ++k)
      pairs.push_back({x, k, sectors.sector_of(x, real.pairs[x][k].tx)});

  std::vector<int> cell_counts(g.n_cells(), 0);
  std::vector<int> sector_counts(sectors.n_sectors(), 0);
  Rng rng(seed);

  auto decide = [&](const PairRef& p, bool self_active,
                    std::vector<int>& cc, std::vector<int>& sc) {
    if (self_active) {
      --cc[p.cell];
      --sc[p.sector];
    }
    std::array<int, kSectorsPerCell> own{};
    for (int s = 0; s < kSectorsPerCell; ++s)
      own[s] = sc[p.cell * kSectorsPerCell + s];
    const auto bp =
        bs_broadcast(p.cell, cc[p.cell], own, g, cs, m, cell_area);
    const double ub =
        pair_upper_bound(g(p.cell, p.k + 1, p.cell, 0), bp, m.p_d_max);
    const auto sd = sector_density(real.pairs[p.cell][p.k].rx, sectors, sc);
    const auto lb = pair_lower_bound(g.intra(p.cell, p.k), sd, bp, m.gamma_d,
                                     m.e_i_cue_d2d, m.noise_d2d);
    if (self_active) {
      ++cc[p.cell];
      ++sc[p.sector];
    }
    return dac_decide(lb, ub);
  };

  for (int it = 1; it <= opt.max_iters; ++it) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto before = out.active;
    if (opt.sequential) {
      for (const PairRef& p : pairs) {
        const bool was = out.active[p.cell][p.k];
        const PairDecision d = decide(p, was, cell_counts, sector_counts);
        if (d.phi != was) {
          const int delta = d.phi ? 1 : -1;
          cell_counts[p.cell] += delta;
          sector_counts[p.sector] += delta;
        }
        out.active[p.cell][p.k] = d.phi;
        out.power[p.cell][p.k] = d.p_tx;
      }
    } else {
      auto cc = cell_counts;
      auto sc = sector_counts;
      for (const PairRef& p : pairs) {
        const PairDecision d = decide(p, before[p.cell][p.k], cc, sc);
        out.active[p.cell][p.k] = d.phi;
        out.power[p.cell][p.k] = d.p_tx;
      }
      std::fill(cell_counts.begin(), cell_counts.end(), 0);
      std::fill(sector_counts.begin(), sector_counts.end(), 0);
      for (const PairRef& p : pairs)
        if (out.active[p.cell][p.k]) {
          ++cell_counts[p.cell];
          ++sector_counts[p.sector];
        }
    }
    out.iterations = it;
    if (opt.record_history) out.history.push_back(out.flat_activity());
    if (out.active == before) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace d2d
