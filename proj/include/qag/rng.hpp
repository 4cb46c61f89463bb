#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qag {

// Portable draws on top of std::mt19937_64. The std distributions are
// implementation-defined, which would make seeded outputs differ between
// standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a parent seed and a tag.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return splitmix64(parent ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

// Uniform in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [lo, hi], inclusive.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(
                  static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(span)) %
                  span);
}

inline double standard_normal(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument away from zero.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qag
