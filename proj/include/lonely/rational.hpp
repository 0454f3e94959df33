#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace lonely {

// All counts and probabilities in this library are exact. BigInt is an
// arbitrary-precision integer; Rational is kept in lowest terms with a
// positive denominator, so equality and ordering are exact comparisons.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_int(BigInt base, std::uint64_t exp) {
  BigInt out = 1;
  while (exp != 0) {
    if (exp & 1) out *= base;
    base *= base;
    exp >>= 1;
  }
  return out;
}

// "num/den" with the denominator always spelled out ("3/4", "1/1", "0/1").
inline std::string fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace lonely
