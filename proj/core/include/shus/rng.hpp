#pragma once

#include <cstdint>
#include <random>

namespace shus {

using Rng = std::mt19937_64;

/// splitmix64 finalizer (Steele, Lea, Flood 2014). This exact function is the
/// seed-derivation contract for replica campaigns: changing it changes every
/// derived stream.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Trial seed for (master seed, grid index, replica index). Depends only on
/// the three inputs, so enlarging a campaign keeps earlier trials unchanged.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t grid_index,
                                 std::uint64_t replica_index) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ grid_index);
  s = mix64(s ^ replica_index);
  return s;
}

}  // namespace shus
