#pragma once

#include <cmath>
#include <cstdint>

namespace adaopt {

// The one pseudorandom generator used anywhere in this project: SplitMix64
// (Steele, Lea & Flood 2014), 64 bits of state, one multiply-xorshift mix per
// draw. It is pinned here, together with the [0,1) mapping and the bounded-int
// reduction, because std::mt19937_64 plus the standard distributions leave the
// draw path implementation-defined and traces would stop being reproducible
// across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1, via the 128-bit multiply-shift
  // reduction. The reduction is biased by less than n/2^64, which is
  // irrelevant at the scales used here, and unlike rejection sampling it
  // consumes exactly one draw per call, keeping streams aligned.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double next_normal() {
    double u1 = next_u01();
    double u2 = next_u01();
    if (u1 < 1e-300) u1 = 1e-300;  // keeps log() finite on a zero draw
    constexpr double kTwoPi = 6.28318530717958647692528676655900577;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // A stream for a sub-purpose (data generation vs. batch sampling) that is
  // decorrelated from the parent seed but still a pure function of it.
  static SplitMix64 derived(std::uint64_t seed, std::uint64_t salt) {
    return SplitMix64(salt_seed(seed, salt));
  }

  // The seed derived() feeds its sub-stream with, for constructors that take
  // a seed value rather than a generator.
  static std::uint64_t salt_seed(std::uint64_t seed, std::uint64_t salt) {
    return seed ^ (0xD1B54A32D192ED03ull * (salt + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace adaopt
