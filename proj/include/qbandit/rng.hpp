#pragma once

#include <cstdint>

namespace qbandit {

// Counter-based generator: each variate is a pure function of
// (seed, slot, draw index). Replications can run on any thread layout
// without perturbing the draw sequence.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t slot, std::uint64_t draw) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (slot * 0xD1342543DE82EF95ULL + draw + 1));
  return mix64(h + 0x2545F4914F6CDD1DULL);
}

// Uniform variate in [0, 1) keyed by (seed, slot, draw).
inline double uniform01(std::uint64_t seed, std::uint64_t slot, std::uint64_t draw) {
  return static_cast<double>(hash_counter(seed, slot, draw) >> 11) * 0x1.0p-53;
}

// Per-slot draw indices (arrival first, capacity second).
inline constexpr std::uint64_t kArrivalDraw = 0;
inline constexpr std::uint64_t kCapacityDraw = 1;

}  // namespace rng
}  // namespace qbandit
