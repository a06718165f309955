#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "d2d/geometry.hpp"
#include "d2d/random.hpp"
#include "d2d/scenario.hpp"
#include "d2d/units.hpp"

namespace d2d {

enum class LinkKind { kUserToBs, kUserToUser };

/// Large-scale propagation model G = c * d^-alpha * shadowing * |h|^2.
struct ChannelParams {
  double c0 = db_to_linear(-30.55);  // user -> BS
  double cd = db_to_linear(-28.03);  // user -> user
  double alpha0 = 3.67;
  double alpha_d = 4.0;
  double shadow_sigma_bs_db = 8.0;
  double shadow_sigma_d2d_db = 8.0;
  bool fading_enabled = false;

  static ChannelParams from_config(const ScenarioConfig& cfg) {
    ChannelParams p;
    p.c0 = db_to_linear(cfg.c0_db);
    p.cd = db_to_linear(cfg.cd_db);
    p.alpha0 = cfg.alpha0;
    p.alpha_d = cfg.alpha_d;
    p.shadow_sigma_bs_db = cfg.shadow_sigma_bs_db;
    p.shadow_sigma_d2d_db = cfg.shadow_sigma_d2d_db;
    p.fading_enabled = cfg.fading;
    p.validate();
    return p;
  }

  void validate() const {
    if (!(alpha0 > 2 && alpha_d > 2))
      throw std::invalid_argument("path-loss exponents must exceed 2");
    if (!(c0 > 0 && cd > 0))
      throw std::invalid_argument("path-loss coefficients must be > 0");
    if (!(shadow_sigma_bs_db >= 0 && shadow_sigma_d2d_db >= 0))
      throw std::invalid_argument("shadowing sigma must be >= 0");
  }

  double coefficient(LinkKind k) const {
    return k == LinkKind::kUserToBs ? c0 : cd;
  }
  double exponent(LinkKind k) const {
    return k == LinkKind::kUserToBs ? alpha0 : alpha_d;
  }
  double shadow_sigma_db(LinkKind k) const {
    return k == LinkKind::kUserToBs ? shadow_sigma_bs_db : shadow_sigma_d2d_db;
  }
};

inline double path_loss_gain(double d, LinkKind kind, const ChannelParams& p) {
  if (!(d > 0)) throw std::invalid_argument("link_gain: zero distance");
  return p.coefficient(kind) * std::pow(d, -p.exponent(kind));
}

/// Realized gain of one directed link. `fading_power` is |h|^2 and is only
/// applied when fading is enabled.
inline double link_gain(const Point& tx, const Point& rx, LinkKind kind,
                        const ChannelParams& p, double shadow_db,
                        double fading_power = 1.0) {
  const double g = path_loss_gain(distance(tx, rx), kind, p) *
                   db_to_linear(shadow_db);
  return p.fading_enabled ? g * fading_power : g;
}

/// Dense gain tensor G[a][b][i][j]: transmitter b of cell a to receiver j of
/// cell i. Index 0 is the CUE (as transmitter) or the BS (as receiver);
/// D2D pair k of a cell is index k + 1 on both sides.
class GainTable {
 public:
  GainTable() = default;

  explicit GainTable(std::vector<int> pairs_per_cell)
      : pairs_(std::move(pairs_per_cell)) {
    offset_.reserve(pairs_.size());
    int n = 0;
    for (int p : pairs_) {
      if (p < 0) throw std::invalid_argument("negative pair count");
      offset_.push_back(n);
      n += p + 1;
    }
    n_nodes_ = n;
    gains_.assign(static_cast<std::size_t>(n) * n, 0.0);
    cue_path_loss_.assign(pairs_.size(), 0.0);
    cue_long_term_.assign(pairs_.size(), 0.0);
  }

  int n_cells() const { return static_cast<int>(pairs_.size()); }
  int n_pairs(int cell) const { return pairs_[cell]; }
  const std::vector<int>& pairs_per_cell() const { return pairs_; }
  int n_nodes() const { return n_nodes_; }
  int node(int cell, int index) const { return offset_[cell] + index; }

  double operator()(int a, int b, int i, int j) const {
    return gains_[flat(node(a, b), node(i, j))];
  }
  void set(int a, int b, int i, int j, double g) {
    gains_[flat(node(a, b), node(i, j))] = g;
  }
  /// Gain of D2D pair k (0-based) of cell x to its own receiver.
  double intra(int x, int k) const { return (*this)(x, k + 1, x, k + 1); }

  /// CUE-to-serving-BS gain as seen by open-loop power control: with
  /// shadowing (long-term) or pure path loss.
  double cue_ofpc_gain(int x, bool with_shadowing) const {
    return with_shadowing ? cue_long_term_[x] : cue_path_loss_[x];
  }
  void set_cue_ofpc_gains(int x, double path_loss, double long_term) {
    cue_path_loss_[x] = path_loss;
    cue_long_term_[x] = long_term;
  }

  friend bool operator==(const GainTable&, const GainTable&) = default;

 private:
  std::size_t flat(int tx, int rx) const {
    return static_cast<std::size_t>(tx) * n_nodes_ + rx;
  }

  std::vector<int> pairs_;
  std::vector<int> offset_;
  int n_nodes_ = 0;
  std::vector<double> gains_;
  std::vector<double> cue_path_loss_;
  std::vector<double> cue_long_term_;
};

inline Point tx_position(const NetworkRealization& real, int cell, int index) {
  return index == 0 ? real.cues[cell] : real.pairs[cell][index - 1].tx;
}

inline Point rx_position(const NetworkRealization& real, int cell, int index) {
  return index == 0 ? real.layout.cell_centers[cell]
                    : real.pairs[cell][index - 1].rx;
}

/// Populates every transmitter x receiver entry with an independent
/// shadowing draw (and fading draw when enabled). Deterministic in seed.
inline GainTable build_gain_table(const NetworkRealization& real,
                                  const ChannelParams& params,
                                  std::uint64_t seed) {
  std::vector<int> ppc;
  for (int x = 0; x < real.n_cells(); ++x) ppc.push_back(real.n_pairs(x));
  GainTable table(ppc);

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const int n = real.n_cells();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= ppc[a]; ++b) {
      const Point tx = tx_position(real, a, b);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= ppc[i]; ++j) {
          const LinkKind kind =
              j == 0 ? LinkKind::kUserToBs : LinkKind::kUserToUser;
          const double shadow = normal(rng) * params.shadow_sigma_db(kind);
          const double fading = params.fading_enabled ? expo(rng) : 1.0;
          const Point rx = rx_position(real, i, j);
          const double g = link_gain(tx, rx, kind, params, shadow, fading);
          table.set(a, b, i, j, g);
          if (b == 0 && j == 0 && a == i) {
            const double pl = path_loss_gain(distance(tx, rx), kind, params);
            table.set_cue_ofpc_gains(a, pl, pl * db_to_linear(shadow));
          }
        }
      }
    }
  }
  return table;
}

/// Debug dump: one "a,b,i,j,gain_db" row per directed link.
inline void write_gain_table_csv(std::ostream& os, const GainTable& g) {
  os << "a,b,i,j,gain_db\n";
  char buf[64];
  for (int a = 0; a < g.n_cells(); ++a)
    for (int b = 0; b <= g.n_pairs(a); ++b)
      for (int i = 0; i < g.n_cells(); ++i)
        for (int j = 0; j <= g.n_pairs(i); ++j) {
          std::snprintf(buf, sizeof buf, "%.17g", linear_to_db(g(a, b, i, j)));
          os << a << ',' << b << ',' << i << ',' << j << ',' << buf << '\n';
        }
}

}  // namespace d2d
