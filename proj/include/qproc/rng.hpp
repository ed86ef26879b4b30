#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qproc {

// xoshiro256++ seeded through splitmix64. All sampling in the library goes
// through this generator so that runs are reproducible bit-for-bit from a
// single seed, independent of the standard library's distribution internals.
// Sub-streams are derived by mixing a stream counter into the seed, which
// keeps parallel row generation deterministic.
class Rng {
 public:
  explicit Rng(uint64_t seed) { reseed(seed); }

  static Rng substream(uint64_t seed, uint64_t stream) {
    return Rng(mix(seed, 0x9e3779b97f4a7c15ULL ^ stream));
  }

  void reseed(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix(x);
    have_normal_ = false;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    const uint64_t limit = n * ((~uint64_t{0}) / n);
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  int sign() { return (next_u64() >> 63) ? 1 : -1; }

  bool bernoulli(double p) { return next_double() < p; }

  // Standard normal via Marsaglia polar, one value cached.
  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return cached_;
    }
    double u, v, q;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    cached_ = v * f;
    have_normal_ = true;
    return u * f;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    uint64_t y = x;
    return splitmix(y);
  }

  std::array<uint64_t, 4> s_{};
  bool have_normal_ = false;
  double cached_ = 0.0;
};

}  // namespace qproc
