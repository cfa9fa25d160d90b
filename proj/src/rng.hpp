#pragma once

#include <cstdint>
#include <random>

#include "octo/shape.hpp"

namespace octo::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combines a base seed with a stream label so that each check and each sample
/// draws from an independent, reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with explicit bit-to-real mapping, so draws do not depend on the
/// standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1).
  Real unit() { return static_cast<Real>(engine_() >> 11) * 0x1.0p-53L; }
  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  Real sign() { return (engine_() & 1U) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace octo::detail
