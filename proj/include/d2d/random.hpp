#pragma once

#include <cstdint>
#include <random>

namespace d2d {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood). Constants are the published
/// ones; changing them changes every seeded result.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from a parent seed and a stream index.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                           std::uint64_t stream) {
  return splitmix64(parent ^ splitmix64(stream));
}

// Named sub-streams of a realization seed.
enum class Stream : std::uint64_t {
  kGeometry = 1,
  kChannel = 2,
  kBacSelection = 3,
  kDacOrder = 4,
};

inline constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream s) {
  return derive_seed(parent, static_cast<std::uint64_t>(s));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace d2d
