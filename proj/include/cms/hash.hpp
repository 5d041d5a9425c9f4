#pragma once

#include <cstdint>

namespace cms {

// splitmix64 (Steele, Lea, Flood 2014). Used both as the row-seed sequence of
// the sketch hash family and as the deterministic RNG of the trace generator.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  constexpr double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Seed of row `row`: the (row+1)-th output of splitmix64 started at
// master_seed. Depends only on (master_seed, row), so sketches of different
// depth built from one master seed share their leading rows.
constexpr std::uint64_t row_seed(std::uint64_t master_seed,
                                 std::uint64_t row) noexcept {
  return mix64(master_seed + (row + 1) * kGoldenGamma);
}

// Column of `item` in a row with the given seed.
constexpr std::uint64_t column_of(std::uint64_t seed, std::uint64_t item,
                                  std::uint64_t width) noexcept {
  return mix64(item ^ seed) % width;
}

}  // namespace cms
