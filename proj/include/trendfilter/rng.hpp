#pragma once

#include <cstdint>

namespace trendfilter {

/// Counter-based 64-bit generator. The k-th output is a pure function of
/// (key, k), so a stream can be positioned anywhere and independent streams
/// are obtained by deriving keys from (seed, stream_index).
///
/// The output function is the SplitMix64 finalizer applied to
/// key + (k + 1) * golden_gamma.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t operator()();
  std::uint64_t at(std::uint64_t counter) const;

  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal draws from a CounterRng using the Box-Muller
/// transform: each pair of uniforms (u1, u2) yields
///   sqrt(-2 ln u1) cos(2 pi u2), sqrt(-2 ln u1) sin(2 pi u2)
/// in that order. Golden files depend on this exact construction.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double operator()();

 private:
  CounterRng rng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace trendfilter
