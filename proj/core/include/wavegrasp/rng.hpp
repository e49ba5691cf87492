#ifndef WAVEGRASP_RNG_HPP_
#define WAVEGRASP_RNG_HPP_

#include <cstdint>
#include <random>

namespace wavegrasp {

using Rng = std::mt19937_64;

// Seed used by every command when none is given.
inline constexpr std::uint64_t kDefaultSeed = 20240607;

// splitmix64 finalizer; derives well-separated child seeds from (seed, stream).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace wavegrasp

#endif  // WAVEGRASP_RNG_HPP_
