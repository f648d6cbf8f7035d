#pragma once

// Deterministic draws layered on the raw mt19937_64 stream. The std <random>
// distribution classes are implementation defined, so building uniforms and
// gaussians by hand keeps a given seed reproducible across toolchains.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace followsim {

using Rng = std::mt19937_64;

// Uniform in [0, 1), 53 bits of precision.
template <class URBG>
double uniform01(URBG& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe to feed to log().
template <class URBG>
double uniform01_open(URBG& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Always consumes exactly two draws.
template <class URBG>
double gaussian(URBG& rng) {
  const double u1 = uniform01_open(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform index in [0, n). n must be positive.
template <class URBG>
std::size_t uniform_index(URBG& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i >= n ? n - 1 : i;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Independent, schedule-free seed for a named stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  return splitmix64(seed ^ fnv1a(stream));
}

}  // namespace followsim
