#pragma once

// Deterministic randomness helpers shared by the instance generator, the
// scenario sampler and the evaluation harness. Streams are derived from user
// seeds with a counter-based mix so that adding a consumer never shifts the
// draws any existing consumer sees.

#include <cstdint>
#include <random>

namespace stochkep {

// SplitMix64-style finalizer over (seed, stream, counter). Cheap, good
// avalanche, dependency-free.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter = 0) {
  std::uint64_t x = seed;
  x += 0x9e3779b97f4a7c15ULL * (stream + 1);
  x += 0xd1b54a32d192ed03ULL * (counter + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Uniform draw in [0, 1) using exactly the top 53 bits of one generator word.
// Hand-rolled rather than std::uniform_real_distribution so streams are
// bit-identical across standard-library implementations.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace stochkep
