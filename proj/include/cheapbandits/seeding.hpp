#pragma once

#include <cstdint>
#include <random>

namespace cheapbandits {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent random streams derived from one run seed.
enum class Stream : std::uint64_t { Graph = 1, Reward = 2, Noise = 3, Cluster = 4 };

/// Seed for stream `s` of run seed `seed`. Pure function of its inputs, so a
/// run replays identically regardless of how runs are spread over workers.
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream s) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(s));
}

inline Rng make_rng(std::uint64_t seed, Stream s) { return Rng{derive_seed(seed, s)}; }

}  // namespace cheapbandits
