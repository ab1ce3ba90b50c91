#pragma once

#include <cstdint>
#include <random>

namespace ictree {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Independent stream per trial so a parallel runner gives schedule-independent
// results: the stream depends only on (seed, trial), never on thread identity.
inline Rng make_trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return Rng(splitmix64(splitmix64(seed) ^ (0x94d049bb133111ebULL * (trial + 1))));
}

// Uniform draw strictly inside (0, 1); safe to pass to log() or quantile().
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace ictree
