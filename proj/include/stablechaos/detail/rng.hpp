#pragma once

#include <cmath>
#include <cstdint>

namespace stablechaos::detail {

// SplitMix64 finalizer; also used to derive stream keys.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Substream ids. One substream per random ingredient, so the draws for one
// ingredient never shift when another ingredient consumes more randomness.
enum class Stream : std::uint64_t {
  sign = 1,
  gap = 2,
  time = 3,
  position = 4,
  replicate = 5,
  mc = 6,
};

// Stateless counter-based generator.
//
// Key derivation:
//   key    = mix64(mix64(seed ^ stream * 0xd1b54a32d192ed03) ^ index * 0x2545f4914f6cdd1d)
//   draw k = mix64(key + k * 0x9e3779b97f4a7c15)
//
// Every (seed, stream, index) triple owns an independent draw sequence.
// A cloud extended to a larger atom count therefore reproduces the original
// atoms bit-exactly, and Monte Carlo replicas can be evaluated in any order
// and on any number of threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept
      : key_(mix64(mix64(seed ^ static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL) ^
                   index * 0x2545f4914f6cdd1dULL)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0, 1).
  double unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double unit_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Strictly positive unit-mean exponential.
  double exponential() noexcept {
    double g = -std::log(unit_pos());
    while (g <= 0.0) g = -std::log(unit_pos());
    return g;
  }

  // Standard normal (Box-Muller, no caching).
  double normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(unit_pos()));
    const double a = 6.283185307179586476925287 * unit();
    return r * std::cos(a);
  }

  int rademacher() noexcept { return (next_u64() & 1u) ? 1 : -1; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace stablechaos::detail
