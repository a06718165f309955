#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "d2d/channel.hpp"
#include "d2d/geometry.hpp"
#include "d2d/outcome.hpp"
#include "d2d/random.hpp"
#include "d2d/statmodel.hpp"

// Blind admission control: every BS bounds the density of active D2D links
// from average CUE and D2D SINR constraints, picks that many pairs at random
// and has them channel-invert to a common received power.

namespace d2d {

/// Both density bounds (links per m^2) evaluated at one received power, plus
/// the design point where they meet.
struct BacBounds {
  double n_c_ub = 0.0;      // from the CUE SINR-loss constraint
  double n_d_ub = 0.0;      // from the D2D SINR constraint
  double p_r_d = 0.0;       // received power the curves were evaluated at
  double p_hat_r_d = 0.0;   // crossing point
  double n_ub = 0.0;        // density at the crossing point
  double i_c = 0.0;         // tolerable extra interference at a BS
  double i_d = 0.0;         // CUE interference plus noise at a D2D receiver

  /// Admissible density at the operating received power.
  double operating_density() const { return std::min(n_c_ub, n_d_ub); }
};

struct BacDesignPoint {
  double p_hat_r_d = 0.0;  // mW
  double n_ub = 0.0;       // links per m^2
};

namespace detail {

struct BacTerms {
  double g_d2d, g_d2d_bs, g_d2d_i;
  double area_c, area_d;
  double i_c, i_d;
};

inline BacTerms bac_terms(const ExpectationContext& ctx, double delta,
                          double gamma_d, double e_i_cue_bs,
                          double e_i_cue_d2d) {
  if (!(delta > 1)) throw std::invalid_argument("BAC: delta must exceed 1");
  if (!(gamma_d > 0)) throw std::invalid_argument("BAC: gamma_d must be > 0");
  return {ctx.e_g_d2d(),
          ctx.e_g_d2d_bs(),
          ctx.e_g_d2d_i(),
          ctx.area_d2d_bs(),
          ctx.area_d2d_i(),
          (delta - 1.0) * (e_i_cue_bs + ctx.noise_bs),
          e_i_cue_d2d + ctx.noise_d2d};
}

}  // namespace detail

/// Closed-form crossing of the two density bounds.
inline BacDesignPoint bac_design_point(const ExpectationContext& ctx,
                                       double delta, double gamma_d,
                                       double e_i_cue_bs, double e_i_cue_d2d) {
  const auto t =
      detail::bac_terms(ctx, delta, gamma_d, e_i_cue_bs, e_i_cue_d2d);
  const double qos = t.g_d2d / gamma_d + t.g_d2d_i;
  const double load = t.area_d * t.g_d2d_i * t.i_c + t.area_c * t.g_d2d_bs * t.i_d;
  BacDesignPoint dp;
  dp.n_ub = std::max(0.0, t.i_c * qos / load);
  dp.p_hat_r_d = t.g_d2d * load / (t.area_c * t.g_d2d_bs * qos);
  return dp;
}

/// Density bounds at received power p_r_d. A negative D2D bound (target not
/// reachable at this power) is reported as 0.
inline BacBounds bac_bounds(const ExpectationContext& ctx, double delta,
                            double gamma_d, double p_r_d, double e_i_cue_bs,
                            double e_i_cue_d2d) {
  if (!(p_r_d > 0)) throw std::invalid_argument("BAC: p_r_d must be > 0");
  const auto t =
      detail::bac_terms(ctx, delta, gamma_d, e_i_cue_bs, e_i_cue_d2d);
  BacBounds b;
  b.p_r_d = p_r_d;
  b.i_c = t.i_c;
  b.i_d = t.i_d;
  b.n_c_ub = t.g_d2d * t.i_c / (p_r_d * t.area_c * t.g_d2d_bs);
  const double n_d = (t.g_d2d / (t.g_d2d_i * gamma_d) + 1.0 -
                      t.g_d2d * t.i_d / (p_r_d * t.g_d2d_i)) /
                     t.area_d;
  b.n_d_ub = std::max(0.0, n_d);
  const auto dp = bac_design_point(ctx, delta, gamma_d, e_i_cue_bs, e_i_cue_d2d);
  b.p_hat_r_d = dp.p_hat_r_d;
  b.n_ub = dp.n_ub;
  return b;
}

/// Per-cell admission: min(floor(density * A_cl), available) pairs drawn
/// uniformly without replacement, each transmitting p_r_d / G_xkxk. A pair
/// whose inversion power exceeds p_d_max is dropped, or held at p_d_max in
/// clamp mode.
inline AdmissionOutcome bac_admit(const NetworkRealization& real,
                                  const BacBounds& bounds, const GainTable& g,
                                  double p_d_max, std::uint64_t seed,
                                  bool clamp = false) {
  auto out = AdmissionOutcome::none(g.pairs_per_cell());
  Rng rng(seed);
  const double density = bounds.operating_density();
  const double area = real.layout.cell_area();
  for (int x = 0; x < g.n_cells(); ++x) {
    const int available = g.n_pairs(x);
    const double budget = std::floor(density * area);
    const int count =
        budget >= available ? available : static_cast<int>(std::max(0.0, budget));
    std::vector<int> order(available);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int s = 0; s < count; ++s) {
      const int k = order[s];
      double p = bounds.p_r_d / g.intra(x, k);
      if (p > p_d_max) {
        if (!clamp) continue;
        p = p_d_max;
      }
      out.active[x][k] = 1;
      out.power[x][k] = p;
    }
  }
  return out;
}

}  // namespace d2d
