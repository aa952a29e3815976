#pragma once

#include <cmath>
#include <cstdint>

namespace progle {

// Counter-based deterministic RNG built on the SplitMix64 finalizer
// (Steele, Lea, Flood; "Fast splittable pseudorandom number generators").
// Every draw is a pure function of (seed, counter), so streams can be
// derived, replayed, and evaluated out of order with identical results on
// any platform. All randomness in the library flows through this generator;
// nothing depends on std::random_device or libstdc++ distribution internals.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stateless combine of a seed with a stream/key index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(key + 1));
}

// Uniform in [0, 1) with 53 random bits.
inline double unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateless per-key coin used for edge dropout: one decision per undirected
// edge, independent of traversal order.
inline double edge_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return unit_double(splitmix64(mix_seed(seed, a) ^ splitmix64(b + 0x632be59bd9b4e019ULL)));
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept { return splitmix64(seed_ + (++counter_) * kGolden); }

  double uniform() noexcept { return unit_double(next_u64()); }

  // Unbiased enough for shuffles; Lemire-style fixed-point scaling, no
  // rejection loop so the draw count per call is constant.
  std::uint64_t uniform_below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  double normal() noexcept {
    // Box-Muller; two fresh uniforms per draw keeps the stream positionable.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Independent substream; derived streams never collide with the parent.
  CounterRng derive(std::uint64_t key) const noexcept { return CounterRng(mix_seed(seed_, key)); }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace progle
