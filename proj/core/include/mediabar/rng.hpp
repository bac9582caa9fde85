#pragma once

#include <cstddef>
#include <cstdint>

namespace mediabar {

/// SplitMix64 (Steele, Lea & Flood). Every seeded draw in the library goes
/// through this generator so that runs are reproducible bit-for-bit:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n > 0. Rejection sampling removes modulo bias:
  /// draws below (2^64 mod n) are discarded.
  std::size_t index(std::size_t n) noexcept {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
  }

 private:
  std::uint64_t state_;
};

/// Seed for the i-th independent sub-run (restart, cluster, K-scan point).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t i) noexcept {
  return seed + i;
}

}  // namespace mediabar
