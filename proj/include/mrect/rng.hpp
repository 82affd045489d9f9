#pragma once

#include <cmath>
#include <cstdint>

namespace mrect {

// splitmix64: the usual seeding/stream-derivation mixer. Stable across
// platforms, unlike std::uniform_int_distribution.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Hash of (seed, k) used where a fixed parameter table is wanted (e.g.
// generator phases) rather than a sequential stream.
inline std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t s = seed * 0x9E3779B97F4A7C15ULL + (k + 1) * 0xBF58476D1CE4E5B9ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Small counter-based generator; every draw is a pure function of
// (seed, counter), so sequences are reproducible bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0,1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Multiply-shift; bias is < 2^-64 per draw
  // which is irrelevant at our bounds (< 2^32).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller (one value kept per pair of uniforms).
  double next_normal() {
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Derive an independent stream deterministically.
  Rng fork(std::uint64_t stream_id) const { return Rng(hash_mix(state_, stream_id)); }

 private:
  std::uint64_t state_;
};

}  // namespace mrect
