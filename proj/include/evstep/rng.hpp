#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded randomness with named substreams. Every random quantity in the
// library draws from a substream derived from (master seed, purpose tag), so
// adding draws for one purpose never perturbs another (e.g. changing the
// number of starting points leaves the design matrix untouched).
//
// Draw order is pinned down here rather than delegated to <random>'s
// distributions, whose algorithms are implementation-defined:
//   uniform: 53-bit mantissa from the top bits of one 64-bit output
//   normal: Box-Muller, cosine branch, two uniforms per call, no caching
//   arcsine on [0,1]: sin^2(pi u / 2) for one uniform u

namespace evstep {

/// SplitMix64 finalizer; bijective 64-bit mixing.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Generator for one (seed, purpose) substream.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose) {
  return std::mt19937_64(mix64(seed ^ mix64(purpose)));
}

/// Uniform on [0, 1), 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1]; safe to pass to log().
inline double uniform_positive(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal draw (Box-Muller, cosine branch).
inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = uniform_positive(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Arcsine-distributed draw on [0, 1] via the inverse CDF sin^2(pi u / 2).
inline double arcsine_unit(std::mt19937_64& rng) {
  const double s = std::sin(1.57079632679489661923 * uniform_unit(rng));
  return s * s;
}

}  // namespace evstep
