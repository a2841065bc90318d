#pragma once

#include <cstdint>

namespace diagpc {

/// Counter-based generator: output n of stream s under seed k is a pure
/// function of (k, s, n), so samples never depend on thread scheduling.
///
/// Algorithm (fixed, platform independent):
///   key  = mix64(seed ^ (stream * 0xD1B54A32D192ED03))
///   bits = mix64(key + (counter + 1) * 0x9E3779B97F4A7C15)
/// where mix64 is the SplitMix64 finalizer. Uniform doubles take the top
/// 53 bits: (bits >> 11) * 2^-53, which lies in [0, 1).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  double uniform(std::uint64_t counter) const noexcept;
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(counter);
  }

  static std::uint64_t mix64(std::uint64_t z) noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential view over one CounterRng stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t start = 0) noexcept
      : rng_(seed, stream), counter_(start) {}

  double uniform() noexcept { return rng_.uniform(counter_++); }
  double uniform(double lo, double hi) noexcept { return rng_.uniform(counter_++, lo, hi); }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  CounterRng rng_;
  std::uint64_t counter_;
};

}  // namespace diagpc
