#pragma once

#include <cstdint>
#include <vector>

namespace d2d {

/// Activity flags and transmit powers (mW) of every D2D pair after an
/// admission method ran. Inactive pairs carry power 0.
struct AdmissionOutcome {
  std::vector<std::vector<std::uint8_t>> active;
  std::vector<std::vector<double>> power;

  // Method diagnostics.
  bool converged = true;       // DAC: fixed point reached
  int iterations = 0;          // DAC: decision rounds run
  bool proven_optimal = true;  // OAC: search finished within budget
  std::uint64_t nodes = 0;     // OAC: feasibility checks performed
  /// DAC: flattened (cell-major) activity vector after each round, when
  /// requested.
  std::vector<std::vector<std::uint8_t>> history;

  static AdmissionOutcome none(const std::vector<int>& pairs_per_cell) {
    AdmissionOutcome o;
    for (int n : pairs_per_cell) {
      o.active.emplace_back(n, 0);
      o.power.emplace_back(n, 0.0);
    }
    return o;
  }

  int n_cells() const { return static_cast<int>(active.size()); }

  int count_active(int cell) const {
    int n = 0;
    for (auto a : active[cell]) n += a ? 1 : 0;
    return n;
  }

  int count_active() const {
    int n = 0;
    for (int x = 0; x < n_cells(); ++x) n += count_active(x);
    return n;
  }

  std::vector<std::uint8_t> flat_activity() const {
    std::vector<std::uint8_t> v;
    for (const auto& cell : active) v.insert(v.end(), cell.begin(), cell.end());
    return v;
  }
};

}  // namespace d2d
