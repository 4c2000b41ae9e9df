#pragma once

#include <cstdint>
#include <random>

namespace wyckoff {

// Seedable stream with fixed semantics: the mt19937_64 engine sequence is
// pinned by the standard, and the real-valued draws below are computed from
// raw engine output rather than through the implementation-defined
// <random> distributions. A seed therefore fixes every draw on every
// conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Raw 64-bit engine output.
  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01();

  /// Uniform between two endpoints in either order: [min(a,b), max(a,b)).
  /// Equal endpoints return that value.
  double uniform(double a, double b);

  /// Normal(mean, sigma) by Box-Muller; consumes exactly two draws per call.
  double gauss(double mean, double sigma);

  /// Uniform integer in [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace wyckoff
