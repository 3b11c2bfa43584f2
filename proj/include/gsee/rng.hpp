#pragma once

#include <cstdint>

namespace gsee {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the independent stream `stream` under `master`:
/// mix(mix(master) ^ ((stream + 1) * 0xD1B54A32D192ED03)).
/// Runs use derive_seed(master, run); rounds inside a run use
/// derive_seed(run_seed, round).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64_mix(splitmix64_mix(master) ^ ((stream + 1) * 0xD1B54A32D192ED03ULL));
}

/// Counter-based generator: draw i of key k is mix(k + i * golden). The state
/// is (key, counter), so any draw can be reproduced without replaying the stream.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next_u64() { return splitmix64_mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gsee
