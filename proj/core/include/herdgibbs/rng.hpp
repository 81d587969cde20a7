#ifndef HERDGIBBS_RNG_HPP
#define HERDGIBBS_RNG_HPP

#include <cstdint>
#include <cmath>

namespace herdgibbs {

// Deterministic pseudo-random generators with bit-exact, documented output.
// Two published algorithms are used instead of any language-default engine so
// that runs reproduce across platforms and standard-library versions:
//
//   SplitMix64  (Steele, Lea, Flood, "Fast splittable pseudorandom number
//   generators", OOPSLA 2014). State z advances by the 64-bit constant
//   0x9E3779B97F4A7C15; output mixes z with xor-shift-multiply using
//   0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
//
//   xoshiro256** 1.0  (Blackman, Vigna, 2018). 256-bit state, output is
//   rotl(s[1] * 5, 7) * 9; state update uses shift 17 and rotation 45.
//
// Uniform doubles take the top 53 bits: (x >> 11) * 2^-53, giving values in
// [0, 1). Normal deviates use the Box-Muller transform on two uniforms with
// the first mapped into (0, 1] so the logarithm is finite.

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& s : s_) s = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; generates pairs and caches the second.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// Seed for replicate r derived from a base seed: the (r+1)-th SplitMix64
// output of the base. Keeps replicate streams decorrelated and documented.
inline std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t replicate) {
  SplitMix64 sm(base);
  std::uint64_t s = 0;
  for (std::uint64_t k = 0; k <= replicate; ++k) s = sm.next();
  return s;
}

}  // namespace herdgibbs

#endif  // HERDGIBBS_RNG_HPP
