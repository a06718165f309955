#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "d2d/cellular.hpp"
#include "d2d/channel.hpp"
#include "d2d/geometry.hpp"
#include "d2d/outcome.hpp"
#include "d2d/scenario.hpp"

namespace d2d {

/// Center-cell statistics of one method on one realization.
struct MetricsRecord {
  Method method = Method::kBac;
  int realization = 0;
  std::uint64_t seed = 0;
  std::uint64_t drop_hash = 0;

  double cue_sinr_db = 0.0;
  double cue_baseline_sinr_db = 0.0;
  double cue_sinr_loss_db = 0.0;      // baseline / realized, >= 0
  std::vector<double> d2d_sinr_db;    // active center-cell pairs, pair order
  int n_active = 0;
  int n_with_qos = 0;                 // active with SINR >= gamma_D
  double se_total = 0.0;              // CUE + active D2D, bps/Hz
  double se_d2d = 0.0;
  double se_baseline = 0.0;           // CUE alone before any D2D
  int n_active_network = 0;
  int n_with_qos_network = 0;

  int iterations = 0;
  bool converged = true;
  bool proven_optimal = true;
  std::uint64_t nodes = 0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Evaluates an outcome on the realized channel and keeps the center cell.
/// SE is the Shannon sum log2(1 + SINR) over the center-cell links.
inline MetricsRecord record(const NetworkRealization& real, const GainTable& g,
                            const AdmissionOutcome& outcome,
                            const CellularState& cs, double noise_bs,
                            double noise_d2d) {
  const int c = real.layout.center_cell_index;
  const SinrReport s =
      realized_sinrs(g, outcome, cs.cue_tx_power, noise_bs, noise_d2d);
  MetricsRecord r;
  r.seed = real.realization_seed;
  r.drop_hash = drop_hash(real);
  r.cue_sinr_db = linear_to_db(s.cue[c]);
  r.cue_baseline_sinr_db = linear_to_db(cs.baseline_sinr[c]);
  r.cue_sinr_loss_db = linear_to_db(cs.baseline_sinr[c] / s.cue[c]);
  r.se_baseline = std::log2(1.0 + cs.baseline_sinr[c]);
  r.se_total = std::log2(1.0 + s.cue[c]);
  for (int x = 0; x < g.n_cells(); ++x) {
    for (int k = 0; k < g.n_pairs(x); ++k) {
      if (!s.pair[x][k]) continue;
      const double sinr = *s.pair[x][k];
      const bool qos = sinr >= cs.gamma_d;
      ++r.n_active_network;
      r.n_with_qos_network += qos;
      if (x != c) continue;
      ++r.n_active;
      r.n_with_qos += qos;
      r.d2d_sinr_db.push_back(linear_to_db(sinr));
      r.se_d2d += std::log2(1.0 + sinr);
    }
  }
  r.se_total += r.se_d2d;
  r.iterations = outcome.iterations;
  r.converged = outcome.converged;
  r.proven_optimal = outcome.proven_optimal;
  r.nodes = outcome.nodes;
  return r;
}

/// Fraction of samples strictly below target.
inline double outage(std::span<const double> samples, double target) {
  if (samples.empty()) throw std::invalid_argument("outage: no samples");
  std::size_t below = 0;
  for (double v : samples) below += v < target;
  return static_cast<double>(below) / samples.size();
}

/// Nearest-rank percentile: the ceil(p n)-th order statistic.
inline double percentile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("percentile: no samples");
  if (!(p > 0 && p < 1))
    throw std::invalid_argument("percentile: p must be in (0, 1)");
  // The small offset keeps p * n that should be integral (but rounded up in
  // binary) from skipping to the next rank.
  auto rank = static_cast<std::size_t>(std::ceil(p * sorted.size() - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

/// Empirical CDF value at x: fraction of samples <= x.
inline double empirical_cdf(std::span<const double> sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / sorted.size();
}

struct MetricStats {
  std::size_t n = 0;
  double p5 = std::numeric_limits<double>::quiet_NaN();
  double p50 = std::numeric_limits<double>::quiet_NaN();
  double p95 = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
};

inline MetricStats stats_of(std::span<const double> sorted) {
  MetricStats s;
  s.n = sorted.size();
  if (sorted.empty()) return s;
  s.p5 = percentile(sorted, 0.05);
  s.p50 = percentile(sorted, 0.50);
  s.p95 = percentile(sorted, 0.95);
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / sorted.size();
  return s;
}

/// Scalar summary as written to summary.json.
struct SummaryStats {
  Method method = Method::kBac;
  std::size_t realizations = 0;
  MetricStats cue_sinr_loss_db, d2d_sinr_db, n_with_qos, n_active, se_total,
      se_d2d, se_baseline;
  double cue_outage = 0.0;  // P(CUE SINR below baseline / delta)
  double d2d_outage = std::numeric_limits<double>::quiet_NaN();
  double dac_converged_fraction = std::numeric_limits<double>::quiet_NaN();
  double oac_proven_fraction = std::numeric_limits<double>::quiet_NaN();
  double mean_iterations = 0.0;
  double mean_nodes = 0.0;
};

/// Sorted pooled samples of one method plus the scalar summary.
struct MetricsSummary {
  Method method = Method::kBac;
  std::vector<double> cue_sinr_loss_db;
  std::vector<double> d2d_sinr_db;
  std::vector<double> n_with_qos;
  std::vector<double> n_active;
  std::vector<double> se_total;
  std::vector<double> se_d2d;
  std::vector<double> se_baseline;
  SummaryStats stats;
};

/// Sort-then-aggregate over the records of one method; independent of the
/// order records arrive in.
inline MetricsSummary summarize(std::span<const MetricsRecord> records,
                                Method method, double delta_db,
                                double gamma_d_db) {
  MetricsSummary s;
  s.method = method;
  std::size_t converged = 0, proven = 0;
  double iters = 0.0, nodes = 0.0;
  std::size_t cue_out = 0;
  for (const MetricsRecord& r : records) {
    if (r.method != method) continue;
    s.cue_sinr_loss_db.push_back(r.cue_sinr_loss_db);
    s.d2d_sinr_db.insert(s.d2d_sinr_db.end(), r.d2d_sinr_db.begin(),
                         r.d2d_sinr_db.end());
    s.n_with_qos.push_back(r.n_with_qos);
    s.n_active.push_back(r.n_active);
    s.se_total.push_back(r.se_total);
    s.se_d2d.push_back(r.se_d2d);
    s.se_baseline.push_back(r.se_baseline);
    cue_out += r.cue_sinr_loss_db > delta_db;
    converged += r.converged;
    proven += r.proven_optimal;
    iters += r.iterations;
    nodes += static_cast<double>(r.nodes);
  }
  for (auto* v : {&s.cue_sinr_loss_db, &s.d2d_sinr_db, &s.n_with_qos,
                  &s.n_active, &s.se_total, &s.se_d2d, &s.se_baseline})
    std::sort(v->begin(), v->end());

  SummaryStats& st = s.stats;
  st.method = method;
  st.realizations = s.cue_sinr_loss_db.size();
  st.cue_sinr_loss_db = stats_of(s.cue_sinr_loss_db);
  st.d2d_sinr_db = stats_of(s.d2d_sinr_db);
  st.n_with_qos = stats_of(s.n_with_qos);
  st.n_active = stats_of(s.n_active);
  st.se_total = stats_of(s.se_total);
  st.se_d2d = stats_of(s.se_d2d);
  st.se_baseline = stats_of(s.se_baseline);
  if (st.realizations > 0) {
    const double n = static_cast<double>(st.realizations);
    st.cue_outage = cue_out / n;
    st.mean_iterations = iters / n;
    st.mean_nodes = nodes / n;
    if (method == Method::kDac) st.dac_converged_fraction = converged / n;
    if (method == Method::kOac) st.oac_proven_fraction = proven / n;
  }
  if (!s.d2d_sinr_db.empty()) st.d2d_outage = outage(s.d2d_sinr_db, gamma_d_db);
  return s;
}

}  // namespace d2d
