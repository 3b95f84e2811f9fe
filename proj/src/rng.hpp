// Copyright 2026 the qzeno developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace qzeno {

/// 64-bit mixing finalizer used by SplitMix64 (Vigna 2015; Steele, Lea and
/// Flood, "Fast splittable pseudorandom number generators", 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seedable, splittable counter-based generator. One independent stream per
/// (seed, stream_id); the same pair always yields a bit-identical sequence,
/// regardless of which thread consumes it or in what order streams are
/// created. Each stream walks its own odd increment (the SplitMix64 "gamma"),
/// so streams for consecutive ids live on distinct orbits.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : state_(mix64(seed + kGolden * stream_id)),
        gamma_(mix64(stream_id + kGolden) | 1ULL) {}

  std::uint64_t next_u64() noexcept {
    state_ += gamma_;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  std::uint64_t state_;
  std::uint64_t gamma_;
};

}  // namespace qzeno
