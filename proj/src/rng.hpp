#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace citequal {

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic PRNG (splitmix64 stream). Every stochastic operation in the
// library draws from an explicitly seeded Rng so that outputs are reproducible
// across runs and platforms; no std::random distributions are used because
// their output sequences are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds (0, 1, 2, ...) diverge immediately.
    next_u64();
    next_u64();
  }

  // Independent substream: same (seed, stream) always yields the same Rng.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t mixed = splitmix64_step(s) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return Rng(mixed);
  }

  std::uint64_t next_u64() { return splitmix64_step(state_); }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) fail(ErrorKind::internal, "Rng::below(0)");
    // Rejection sampling to avoid modulo bias.
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller. Both uniforms are always consumed so the
  // draw count per call is fixed.
  double normal() {
    double u1 = unit();
    double u2 = unit();
    while (u1 <= 0.0) u1 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Poisson via Knuth's product-of-uniforms method; fine for small means.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= unit();
    } while (p > limit);
    return k - 1;
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace citequal
