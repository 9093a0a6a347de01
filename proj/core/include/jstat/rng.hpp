#pragma once

#include <cstdint>
#include <random>

namespace jstat {

/// Bumped whenever the mapping from seed to output stream changes.
inline constexpr int kRngStreamVersion = 1;

/// SplitMix64 finaliser (Steele, Lea & Flood).
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for replicate/stream `stream` of a run seeded with `seed`:
///   splitmix64(seed ^ splitmix64(stream)).
/// Distinct streams never share generator state.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 (fully specified by the standard) with our own uniform
/// transform and Boost's Poisson sampler, so streams are identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Poisson variate; returns 0 for mean <= 0.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace jstat
