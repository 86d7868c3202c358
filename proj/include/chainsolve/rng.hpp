#pragma once

#include <cstdint>
#include <string_view>

namespace chainsolve {

/// Counter-based generator: output n of a stream is splitmix64(key + n * phi).
/// Streams are split by hashing the parent key with a child index, so a
/// subtree's draws depend only on (seed, path from the root).
class CounterRng {
public:
  static constexpr std::string_view kName = "splitmix64-counter/1";

  static CounterRng from_seed(std::uint64_t seed) { return CounterRng(mix(seed ^ 0x5851f42d4c957f2dULL)); }

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next() noexcept { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  CounterRng split(std::uint64_t index) const noexcept { return CounterRng(mix(key_ ^ mix(index + kGolden))); }

  std::uint64_t key() const noexcept { return key_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

} // namespace chainsolve
