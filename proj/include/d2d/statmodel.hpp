#pragma once

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "d2d/channel.hpp"
#include "d2d/scenario.hpp"
#include "d2d/units.hpp"

// Statistical interference model: users scattered uniformly around a victim
// receiver, distances following the triangular density 2x / d_max^2 on
// [d_min, d_max], unit-mean fading, and a finite interference area outside
// of which a max-power interferer falls below the noise floor.

namespace d2d {

struct DistanceBounds {
  double min = 0.0;
  double max = 0.0;
};

/// Expected c * d^-alpha under the density 2x / d_max^2 on [d_min, d_max].
///
/// That density only integrates to 1 - (d_min/d_max)^2; the closed form is
/// kept as is by default. `normalized` divides by the missing mass.
inline double expected_gain(double c, double alpha, double d_min, double d_max,
                            bool normalized = false) {
  if (!(alpha > 2))
    throw std::invalid_argument("expected_gain: alpha must exceed 2");
  if (!(d_min > 0 && d_min < d_max))
    throw std::invalid_argument("expected_gain: need 0 < d_min < d_max");
  const double k = alpha - 2.0;
  const double g = 2.0 * c * (std::pow(d_min, -k) - std::pow(d_max, -k)) /
                   (d_max * d_max * k);
  if (!normalized) return g;
  const double r = d_min / d_max;
  return g / (1.0 - r * r);
}

/// Distance beyond which an interferer at full power is received below the
/// noise floor: p * c * d^-alpha = noise.
inline double interference_radius(double p_tx_max, double c, double alpha,
                                  double noise) {
  return std::pow(p_tx_max * c / noise, 1.0 / alpha);
}

/// Everything the expectation formulas need, resolved once per scenario.
struct ExpectationContext {
  ChannelParams params;
  double noise_bs = 0.0;   // mW
  double noise_d2d = 0.0;  // mW
  double p_d_max = 0.0;    // mW
  double p_c_max = 0.0;    // mW
  double cell_radius = 0.0;

  DistanceBounds d2d;         // transmitter to own receiver
  DistanceBounds d2d_bs;      // D2D transmitter to BS
  DistanceBounds d2d_i;       // D2D transmitter to another pair's receiver
  DistanceBounds cue_bs_in;   // CUE to serving BS
  DistanceBounds cue_bs_out;  // interfering CUE to another BS
  DistanceBounds cue_d;       // CUE to D2D receiver
  bool normalized = false;

  static ExpectationContext from_config(const ScenarioConfig& cfg) {
    ExpectationContext ctx;
    ctx.params = ChannelParams::from_config(cfg);
    ctx.noise_bs = ctx.noise_d2d = cfg.noise_mw();
    ctx.p_d_max = cfg.p_d_max_mw();
    ctx.p_c_max = cfg.p_c_max_mw();
    ctx.cell_radius = cfg.cell_radius_m;
    ctx.normalized = cfg.normalized_pdf;
    const auto& p = ctx.params;
    ctx.d2d = {cfg.d2d_min_m, cfg.d2d_max_m};
    ctx.d2d_bs = {cfg.d_min_m, interference_radius(ctx.p_d_max, p.c0, p.alpha0,
                                                   ctx.noise_bs)};
    ctx.d2d_i = {cfg.d2d_min_m, interference_radius(ctx.p_d_max, p.cd,
                                                    p.alpha_d, ctx.noise_d2d)};
    ctx.cue_bs_in = {cfg.d_min_m, cfg.cell_radius_m};
    ctx.cue_bs_out = {cfg.cell_radius_m,
                      interference_radius(ctx.p_c_max, p.c0, p.alpha0,
                                          ctx.noise_bs)};
    ctx.cue_d = {cfg.d_min_m, interference_radius(ctx.p_c_max, p.cd, p.alpha_d,
                                                  ctx.noise_d2d)};
    return ctx;
  }

  double e_g_d2d() const {
    return expected_gain(params.cd, params.alpha_d, d2d.min, d2d.max,
                         normalized);
  }
  double e_g_d2d_bs() const {
    return expected_gain(params.c0, params.alpha0, d2d_bs.min, d2d_bs.max,
                         normalized);
  }
  double e_g_d2d_i() const {
    return expected_gain(params.cd, params.alpha_d, d2d_i.min, d2d_i.max,
                         normalized);
  }
  double e_g_cue_d() const {
    return expected_gain(params.cd, params.alpha_d, cue_d.min, cue_d.max,
                         normalized);
  }
  /// Interference area of a BS w.r.t. D2D transmitters.
  double area_d2d_bs() const { return disc_area(d2d_bs.max); }
  /// Interference area of a D2D receiver w.r.t. other D2D transmitters.
  double area_d2d_i() const { return disc_area(d2d_i.max); }
  /// Interference area of a D2D receiver w.r.t. CUEs.
  double area_cue_d() const { return disc_area(cue_d.max); }
};

/// E[(gamma_th * N_BS / G_in)^alpha_p * P_max^(1 - alpha_p)] for a CUE whose
/// distance to its BS follows the triangular density on [d_min, R], shadowing
/// excluded. The density is renormalised here so that alpha_p = 0 yields
/// P_max exactly; bounds with d_min == R act as a point mass.
inline double expected_cue_tx_power(const ExpectationContext& ctx,
                                    double alpha_p, double gamma_cue_th,
                                    double cell_radius, double d_min) {
  if (!(alpha_p >= 0 && alpha_p <= 1))
    throw std::invalid_argument("alpha_p must be in [0, 1]");
  const double c0 = ctx.params.c0;
  const double a0 = ctx.params.alpha0;
  const double pmax = ctx.p_c_max;
  const double target = gamma_cue_th * ctx.noise_bs;
  auto power_at = [&](double d) {
    const double g = c0 * std::pow(d, -a0);
    return std::pow(target / g, alpha_p) * std::pow(pmax, 1.0 - alpha_p);
  };
  if (alpha_p == 0.0) return pmax;
  if (d_min == cell_radius) return power_at(d_min);
  if (!(d_min > 0 && d_min < cell_radius))
    throw std::invalid_argument("expected_cue_tx_power: need 0 < d_min <= R");
  const double mass = 1.0 - (d_min * d_min) / (cell_radius * cell_radius);
  auto integrand = [&](double x) {
    return power_at(x) * 2.0 * x / (cell_radius * cell_radius);
  };
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, d_min, cell_radius, 15, 1e-12);
  return v / mass;
}

/// Expected inter-cell interference at a BS from CUEs of other cells: CUE
/// density 1/A_cl over the annulus between the cell edge and the CUE
/// interference radius. Zero when that radius does not exceed R.
inline double expected_cue_interference_at_bs(const ExpectationContext& ctx,
                                              double cell_area, double alpha_p,
                                              double gamma_cue_th) {
  const double r_out = ctx.cue_bs_out.max;
  const double R = ctx.cell_radius;
  if (!(r_out > R)) return 0.0;
  const double area = disc_area(r_out) - disc_area(R);
  const double e_p = expected_cue_tx_power(ctx, alpha_p, gamma_cue_th, R,
                                           ctx.cue_bs_in.min);
  const double e_g = expected_gain(ctx.params.c0, ctx.params.alpha0, R, r_out,
                                   ctx.normalized);
  return area / cell_area * e_p * e_g;
}

/// Expected interference at a D2D receiver from CUEs within the CUE-to-device
/// interference radius.
inline double expected_cue_interference_at_d2d(const ExpectationContext& ctx,
                                               double cell_area,
                                               double alpha_p,
                                               double gamma_cue_th) {
  const double e_p = expected_cue_tx_power(ctx, alpha_p, gamma_cue_th,
                                           ctx.cell_radius, ctx.cue_bs_in.min);
  return ctx.area_cue_d() / cell_area * e_p * ctx.e_g_cue_d();
}

}  // namespace d2d
