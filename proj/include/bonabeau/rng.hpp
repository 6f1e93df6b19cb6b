#pragma once

#include <cstdint>
#include <random>

namespace bonabeau {

/// SplitMix64 finalizer applied to x + golden-ratio increment.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream seed for one replicate of one sweep cell:
///   s = splitmix64(master); s = splitmix64(s ^ cell); s = splitmix64(s ^ replicate)
/// Cells never share a stream, and adding cells leaves existing streams intact.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_index,
                                    std::uint64_t replicate_index) noexcept {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ cell_index);
  return splitmix64(s ^ replicate_index);
}

// Random source with portable draws. std::mt19937_64 output is fixed by the
// standard; the distributions below are ours so results do not depend on the
// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t index(std::uint64_t bound) {
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  bool coin() { return (next() >> 63) != 0; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bonabeau
