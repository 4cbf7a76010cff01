#pragma once

#include <cstdint>
#include <random>

namespace epcap {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the independent stream `index` under `master`. Results computed
/// from a stream depend only on (master, index), never on scheduling.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace epcap
