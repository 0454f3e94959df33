#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "lonely/rational.hpp"

namespace lonely {
namespace detail {

// splitmix64 output function; used to spread user seeds into independent
// stream seeds so that nearby bases do not produce correlated generators.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base + stream * 0x9E3779B97F4A7C15ull);
}

// Exact Bernoulli trial driven by one 64-bit uniform word: fires iff
// u < floor(p * 2^64). Rounding down keeps thresholds monotone in p and
// keeps p = 0 exact; p = 1 needs the flag since its threshold is 2^64.
// The per-trial bias is below 2^-64, far outside statistical visibility,
// and every pathwise comparison in the couplings relies only on threshold
// ordering, which floor preserves.
struct Bern {
  std::uint64_t threshold = 0;
  bool certain = false;

  bool fire(std::uint64_t u) const { return certain || u < threshold; }
};

inline Bern make_bern(const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("make_bern: probability out of [0,1]");
  if (p == 1) return {0, true};
  const BigInt scaled = (numerator(p) << 64) / denominator(p);
  return {scaled.convert_to<std::uint64_t>(), false};
}

// Unbiased integer in [0, k) by rejection below 2^64 mod k.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("uniform_below: need k >= 1");
  const std::uint64_t reject = (0 - k) % k;  // 2^64 mod k
  for (;;) {
    const std::uint64_t u = rng();
    if (u >= reject) return u % k;
  }
}

}  // namespace detail
}  // namespace lonely
