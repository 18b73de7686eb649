#pragma once

#include <cmath>
#include <cstdint>
#include <complex>

#include "isac/constants.hpp"

namespace isac {

// splitmix64: the counter-based seed splitter used to fan a master seed out
// to per-trial / per-stream generators. Stateless, so trial i of a Monte
// Carlo campaign gets the same seed regardless of thread scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for stream `stream`, element `index`, derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ (stream * 0xD1342543DE82EF95ull)) + index);
}

// Self-contained xoshiro256** generator with uniform / Gaussian draws.
// Using our own generator (rather than std::normal_distribution, whose
// algorithm is implementation-defined) keeps results bit-identical across
// standard libraries, which the reproducibility contract requires.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s = splitmix64(s);
      word = s;
    }
    have_cached_gauss_ = false;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection-free modulo bias is negligible for the n used here, but do
    // the widening-multiply trick anyway.
    __uint128_t wide = static_cast<__uint128_t>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  // Standard normal via Box-Muller (cached pair).
  double gaussian() {
    if (have_cached_gauss_) {
      have_cached_gauss_ = false;
      return cached_gauss_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * pi * u2;
    cached_gauss_ = r * std::sin(a);
    have_cached_gauss_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_gaussian(double variance = 1.0) {
    const double s = std::sqrt(variance * 0.5);
    return {s * gaussian(), s * gaussian()};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double cached_gauss_ = 0.0;
  bool have_cached_gauss_ = false;
};

}  // namespace isac
