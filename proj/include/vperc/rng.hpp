#pragma once

#include <cstdint>
#include <random>

namespace vperc {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `index` under `master`. Every parallel loop derives its
/// per-replication stream through this function, so results never depend on
/// which worker ran which replication.
inline Seed derive_seed(Seed master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

inline Rng make_rng(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Colour of cell `i` under a hashed colouring; lets explorers draw colours
/// lazily without materialising the whole vector.
inline int hashed_sign(Seed seed, std::uint64_t i) {
  return (splitmix64(seed ^ (i * 0x9e3779b97f4a7c15ULL)) >> 63) ? 1 : -1;
}

}  // namespace vperc
