#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace noiselab {

// splitmix64 finalizer; used to derive independent per-example seeds.
inline std::uint64_t mix_bits(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t stream,
                                 std::uint64_t index) {
  return mix_bits(mix_bits(global_seed ^ 0xa0761d6478bd642fULL) ^ mix_bits(stream) ^
                  mix_bits(index ^ 0xe7037ed1a0b428dbULL));
}

/// Seeded random source. Draws go through explicit conversions from raw
/// mt19937_64 output instead of std::*_distribution so that sampled values
/// are bit-identical across standard library implementations, which is what
/// keeps synthesized corpora reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is < 2^-53 for the sizes used here.
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  /// Box-Muller transform; consumes exactly two uniforms per call so the
  /// draw sequence is independent of call history.
  double gaussian(double mean, double stddev) {
    // (0, 1] keeps the log argument positive.
    double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace noiselab
