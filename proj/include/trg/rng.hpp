#pragma once

// Random streams. Every sampler takes its generator explicitly; parallel
// workers get independent substreams derived from a master seed.

#include <cmath>
#include <cstdint>
#include <random>

namespace trg {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `master`:
///   splitmix64(splitmix64(master) ^ splitmix64(index + 1)).
/// Counter-based, so substream i never depends on how many others exist.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

inline Rng make_substream(std::uint64_t master, std::uint64_t index) { return Rng(substream_seed(master, index)); }

/// Uniform double in (0, 1], built from the top 53 bits (platform independent).
inline double uniform_open_closed(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound) by rejection (unbiased, deterministic).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace trg
