#pragma once

#include <cmath>
#include <numbers>

namespace d2d {

inline constexpr double kPi = std::numbers::pi;

/// Thermal noise spectral density used for every receiver [dBm/Hz].
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Powers are carried in mW throughout the library.
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

/// Noise power over a bandwidth, in dBm.
inline double noise_dbm(double density_dbm_hz, double bandwidth_hz) {
  return density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
}

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double disc_area(double radius) { return kPi * radius * radius; }

}  // namespace d2d
