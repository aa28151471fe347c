// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace telegraph {

/// SplitMix64 step; used for seeding and for hashing (seed, index) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator, but the
/// variate helpers below are used instead of <random> distributions so that
/// streams are identical across standard library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  /// Substream `index` of `master_seed`. Depends only on the pair, so any
  /// replication can be regenerated independently of execution order.
  static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t a = master_seed;
    std::uint64_t b = index ^ 0xD1B54A32D192ED03ULL;
    const std::uint64_t h1 = splitmix64(a);
    const std::uint64_t h2 = splitmix64(b);
    return RandomStream(h1 ^ (h2 * 0xFF51AFD7ED558CCDULL));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
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

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform_open_closed()) / rate; }

  /// +1 or -1 with probability 1/2 each.
  int sign() { return ((*this)() >> 63) ? 1 : -1; }

  /// Standard normal via Box-Muller (one variate per call, the second is dropped).
  double normal() {
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace telegraph
