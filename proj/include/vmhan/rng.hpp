// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace vmhan {

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then
/// the output is the state passed through a fixed xor-shift-multiply mixer.
/// Integer-only, so a seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream keyed by `stream`; does not advance *this.
  Rng fork(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vmhan
