#pragma once

#include <cstdint>

namespace mcig {

/// SplitMix64 evaluated in counter mode.
///
/// The n-th output (n >= 1) of the stream seeded with `seed` is
/// mix(seed + n * 0x9E3779B97F4A7C15), identical to the n-th call of the
/// sequential SplitMix64 generator. Random access makes streams trivially
/// partitionable: variate i of a sample set owns positions
/// [16 i + 1, 16 i + 16] and never reads outside them.
class CounterRng {
public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr int kSlotsPerVariate = 16;

  [[nodiscard]] static std::uint64_t at(std::uint64_t seed,
                                        std::uint64_t position) noexcept;

  /// Maps 64 random bits to a double strictly inside (0, 1).
  [[nodiscard]] static double to_open_unit(std::uint64_t bits) noexcept;
};

/// The uniform draws available to one variate.
class VariateStream {
public:
  VariateStream(std::uint64_t seed, std::uint64_t index) noexcept
      : seed_(seed), index_(index) {}

  /// Next uniform in (0, 1). Throws once the variate's 16 slots are spent.
  double uniform();
  /// Box-Muller (cosine branch), consumes two slots.
  double standard_normal();

  [[nodiscard]] std::uint64_t index() const noexcept { return index_; }
  [[nodiscard]] int slots_used() const noexcept { return slot_; }

private:
  std::uint64_t seed_;
  std::uint64_t index_;
  int slot_ = 0;
};

} // namespace mcig
