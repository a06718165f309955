#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "d2d/random.hpp"
#include "d2d/scenario.hpp"
#include "d2d/units.hpp"

namespace d2d {

/// Circular cells with a BS at each center.
struct CellLayout {
  std::vector<Point> cell_centers;
  double cell_radius = 0.0;
  int center_cell_index = 0;

  int n_cells() const { return static_cast<int>(cell_centers.size()); }
  double cell_area() const { return disc_area(cell_radius); }
};

struct D2DPair {
  Point tx;
  Point rx;
};

/// One random drop of users over a layout.
struct NetworkRealization {
  CellLayout layout;
  std::vector<Point> cues;                  // one per cell
  std::vector<std::vector<D2DPair>> pairs;  // per cell
  std::uint64_t realization_seed = 0;

  int n_cells() const { return layout.n_cells(); }
  int n_pairs(int cell) const { return static_cast<int>(pairs[cell].size()); }
  int total_pairs() const {
    int n = 0;
    for (const auto& p : pairs) n += static_cast<int>(p.size());
    return n;
  }
};

/// 1 cell at the origin, or a center cell plus six neighbours at distance
/// 2R and angles k*60 degrees. The center cell is index 0.
inline CellLayout build_layout(int n_cells, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("cell radius must be > 0");
  if (n_cells != 1 && n_cells != 7)
    throw std::invalid_argument("only 1- and 7-cell layouts are supported");
  CellLayout layout;
  layout.cell_radius = radius;
  layout.cell_centers.push_back({0.0, 0.0});
  for (int k = 0; k < n_cells - 1; ++k) {
    const double a = k * kPi / 3.0;
    layout.cell_centers.push_back({2.0 * radius * std::cos(a),
                                   2.0 * radius * std::sin(a)});
  }
  return layout;
}

/// Arbitrary layout, mostly for small hand-built test networks.
inline CellLayout make_layout(std::vector<Point> centers, double radius,
                              int center_cell_index = 0) {
  if (centers.empty()) throw std::invalid_argument("layout needs a cell");
  if (!(radius > 0)) throw std::invalid_argument("cell radius must be > 0");
  return CellLayout{std::move(centers), radius, center_cell_index};
}

/// Area-uniform point in the annulus [r_min, r_max] around `center`.
inline Point sample_annulus(Rng& rng, const Point& center, double r_min,
                            double r_max) {
  const double u = uniform(rng, 0.0, 1.0);
  const double r = std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
  const double a = uniform(rng, 0.0, 2.0 * kPi);
  return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
}

/// Drops one CUE per cell and pairs_per_cell D2D pairs per cell. Every user
/// (CUE or D2D transmitter) lies in [d_min, R] from its BS; a receiver sits
/// at a distance uniform in [d2d_min, d2d_max] from its transmitter and may
/// leave the cell disc. Pure in (layout, cfg, seed).
inline NetworkRealization drop_users(const CellLayout& layout,
                                     const ScenarioConfig& cfg,
                                     std::uint64_t seed) {
  const double R = layout.cell_radius;
  if (!(cfg.d_min_m > 0 && cfg.d_min_m < R))
    throw std::invalid_argument("drop_users: need 0 < d_min < R");
  if (!(cfg.d2d_min_m > 0 && cfg.d2d_min_m <= cfg.d2d_max_m))
    throw std::invalid_argument("drop_users: need 0 < D_min <= D_max");
  if (cfg.pairs_per_cell < 0)
    throw std::invalid_argument("drop_users: negative pair count");

  Rng rng(seed);
  NetworkRealization real;
  real.layout = layout;
  real.realization_seed = seed;
  real.cues.reserve(layout.n_cells());
  real.pairs.resize(layout.n_cells());
  for (int x = 0; x < layout.n_cells(); ++x) {
    const Point& bs = layout.cell_centers[x];
    real.cues.push_back(sample_annulus(rng, bs, cfg.d_min_m, R));
    auto& cell_pairs = real.pairs[x];
    cell_pairs.reserve(cfg.pairs_per_cell);
    for (int k = 0; k < cfg.pairs_per_cell; ++k) {
      const Point tx = sample_annulus(rng, bs, cfg.d_min_m, R);
      const double d = cfg.d2d_min_m == cfg.d2d_max_m
                           ? cfg.d2d_min_m
                           : uniform(rng, cfg.d2d_min_m, cfg.d2d_max_m);
      const double a = uniform(rng, 0.0, 2.0 * kPi);
      cell_pairs.push_back({tx, {tx.x + d * std::cos(a), tx.y + d * std::sin(a)}});
    }
  }
  return real;
}

/// FNV-1a over all coordinates; identifies a drop in output records.
inline std::uint64_t drop_hash(const NetworkRealization& real) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (const Point& c : real.cues) {
    mix(c.x);
    mix(c.y);
  }
  for (const auto& cell : real.pairs)
    for (const D2DPair& p : cell) {
      mix(p.tx.x);
      mix(p.tx.y);
      mix(p.rx.x);
      mix(p.rx.y);
    }
  return h;
}

}  // namespace d2d
