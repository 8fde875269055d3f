#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hgcoop {

using Engine = std::mt19937_64;

// splitmix64 finalizer. Stable across releases: per-instance and per-chunk
// seeds are derived with it, so changing it changes every sweep output.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return mix64(base ^ mix64(a));
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix64(derive_seed(base, a) ^ mix64(b + 0x632be59bd9b4e019ULL));
}

// The standard distributions are implementation-defined, so the few draws we
// need are written out here to keep seeded outputs identical across toolchains.

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound), bound > 0 (Lemire's nearly-divisionless method).
__extension__ typedef unsigned __int128 uint128;

inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  uint128 m = static_cast<uint128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<uint128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Standard exponential via inversion.
inline double exponential1(Engine& rng) {
  return -std::log1p(-uniform01(rng));
}

}  // namespace hgcoop
