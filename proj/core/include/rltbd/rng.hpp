#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rltbd {

using Rng = std::mt19937_64;

// splitmix64 finalizer. Seeds that differ in one bit land in unrelated
// engine states, so (master, run, component) tuples give independent streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t master, std::uint64_t run, std::uint64_t component) {
  return Rng(mix_seed(mix_seed(master, run), component));
}

// Distribution objects are constructed per call: they carry hidden state
// (normal_distribution caches a spare variate) that would otherwise make
// draw sequences depend on call history.
inline double draw_uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double draw_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t draw_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace rltbd
