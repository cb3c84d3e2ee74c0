#pragma once

#include <cstdint>
#include <random>

namespace geomrl {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for sub-stream `tag` of `parent`. Every random stream in the
/// library is derived from one master seed through this rule:
///   run      = derive_seed(master, run_seed)
///   rollout  = derive_seed(derive_seed(run, kRolloutStream), rollout_index)
///   cmaes    = derive_seed(derive_seed(run, kCmaesStream), generation)
///   instance = derive_seed(env_seed, run_seed)
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return mix64(parent ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

inline constexpr std::uint64_t kRolloutStream = 2;
inline constexpr std::uint64_t kCmaesStream = 3;

}  // namespace geomrl
