#pragma once

#include <cstdint>
#include <random>

namespace advsim {

/// Deterministic generator shared by the engine.
///
/// std::mt19937_64 output is fixed by the standard, but the standard
/// distributions are not, so sampling is done here with explicit
/// arithmetic to keep runs identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Independent child stream; advances this generator by one draw.
  Rng split() { return Rng(next()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace advsim
