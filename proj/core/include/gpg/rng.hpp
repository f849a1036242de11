#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gpg {

using Rng = std::mt19937_64;

// SplitMix64 finalizer, used for seed mixing and derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a stream tag.
// Same (master, tag) pair gives the same seed on every platform.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  return splitmix64(master ^ splitmix64(tag));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

// Uniform integer in [0, n). Avoids std::uniform_int_distribution, whose
// output differs between standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  // Lemire-style rejection to remove modulo bias.
  std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return static_cast<std::size_t>(r % n);
  }
}

// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

inline bool coin(Rng& rng, double p = 0.5) {
  return uniform_unit(rng) < p;
}

template <typename T>
void shuffle(Rng& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace gpg
