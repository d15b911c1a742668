// Seeded random number generation. std::mt19937_64 provides the raw stream
// (its output is pinned by the standard); the value-level samplers are
// hand-rolled because the standard distributions are implementation-defined
// and would break cross-toolchain reproducibility.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace sparserl {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; always consumes exactly two raw draws per value.
  double normal(double mean, double stddev) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + stddev * (r * std::cos(kTwoPi * u2));
  }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    std::uint64_t rem = std::uint64_t(-1) % n;
    std::uint64_t limit = std::uint64_t(-1) - rem;  // largest multiple of n
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 gen_;
};

// Derives an independent stream seed from a master seed (splitmix64 finalizer).
inline std::uint64_t seed_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace sparserl
