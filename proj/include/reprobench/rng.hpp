#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

// Seeded randomness helpers. std::mt19937_64 has a standard-defined output
// sequence, but the std distributions do not, so all sampling here is
// hand-rolled to keep results reproducible across standard libraries.
namespace reprobench::rng {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable derivation of sub-seeds from a master seed and a list of indices.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

// Uniform in [0, 1), 53 bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Unbiased uniform integer in [0, n). Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
  const std::uint64_t threshold = (-n) % n;
  for (;;) {
    unsigned __int128 m = static_cast<unsigned __int128>(eng()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold)
      return static_cast<std::uint64_t>(m >> 64);
  }
}

// Standard normal via Box-Muller (no rejection loop).
inline double normal(Engine& eng) {
  double u1;
  do {
    u1 = uniform01(eng);
  } while (u1 == 0.0);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
}

// Exponential with the given mean.
inline double exponential(Engine& eng, double mean) {
  return -mean * std::log1p(-uniform01(eng));
}

namespace detail {
inline std::uint64_t poisson_knuth(Engine& eng, double lambda) {
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01(eng);
  } while (p > limit);
  return k - 1;
}
}  // namespace detail

// Poisson; large means are split to keep exp(-lambda) well away from underflow.
inline std::uint64_t poisson(Engine& eng, double lambda) {
  std::uint64_t n = 0;
  while (lambda > 32.0) {
    n += detail::poisson_knuth(eng, 32.0);
    lambda -= 32.0;
  }
  return n + detail::poisson_knuth(eng, lambda);
}

}  // namespace reprobench::rng
