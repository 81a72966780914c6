// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace corrugate::rng {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// Counter-based generator: the value at counter k is a pure function of
// (key, k), so any draw can be regenerated in isolation and evaluation
// order never matters.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kGamma);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Rademacher draw, exactly +1 or -1 with equal probability.
  int sign(std::uint64_t counter) const {
    return (bits(counter) >> 63) ? 1 : -1;
  }

  // Standard normal via Box-Muller; consumes counters 2k and 2k+1.
  double normal(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t key_;
};

// Per-sample key derivation: master_seed XOR hash(sample_index).
inline std::uint64_t derive_key(std::uint64_t master_seed, std::uint64_t index) {
  return master_seed ^ mix64(index + kGamma);
}

}  // namespace corrugate::rng
