#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace lacuna::rng {

// std::mt19937_64 with explicit draw helpers. The standard distribution
// classes are implementation-defined, so every sampling decision in the
// library goes through the fully specified routines below; a given seed
// produces the same stream on every platform.
using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

// splitmix64 finalizer; used to derive independent sub-stream seeds.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = eng();
  } while (x > limit);
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& items, Engine& eng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Index drawn with probability weights[i] / sum(weights). Weights must be
// non-negative with a positive sum.
inline std::size_t sample_discrete(std::span<const double> weights, Engine& eng) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("sample_discrete: negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("sample_discrete: weights sum to zero");
  const double u = uniform01(eng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace lacuna::rng
