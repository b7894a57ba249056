#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "masec/types.hpp"

namespace masec {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the stream addressed by `path` under `master`. Streams with
/// different paths are statistically independent, and adding streams never
/// shifts the draws of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Seeded random stream with a fixed, platform-independent conversion from
/// engine bits to real numbers (the std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Child stream keyed by `path`; does not advance this stream.
  Rng split(std::initializer_list<std::uint64_t> path) const {
    return Rng(derive_seed(seed_, path));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (one value per call).
  double normal();

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  cd complex_normal(double variance);

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace masec
