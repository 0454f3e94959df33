#pragma once

#include <mutex>
#include <stdexcept>
#include <vector>

#include "lonely/rational.hpp"

namespace lonely {

// Triangle of Stirling numbers of the second kind S(n,k): the number of
// partitions of an n-set into k nonempty blocks. Conventions: S(0,0)=1,
// S(n,0)=0 for n>0, S(n,k)=0 for k>n, which make the recurrence
// S(n,k) = S(n-1,k-1) + k*S(n-1,k) total at the boundaries.
//
// The triangle grows lazily and monotonically. Access is serialized, so a
// reader never observes a partially written row.
class StirlingTable {
 public:
  explicit StirlingTable(int max_n = 0) { ensure(max_n); }

  void ensure(int max_n) {
    std::lock_guard<std::mutex> lock(mu_);
    grow(max_n);
  }

  int max_n() const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<int>(rows_.size()) - 1;
  }

  BigInt value(int n, int k) const {
    if (n < 0 || k < 0) throw std::invalid_argument("stirling2: negative argument");
    if (k > n) return 0;
    if (n > 0 && k == 0) return 0;
    std::lock_guard<std::mutex> lock(mu_);
    grow(n);
    return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
  }

 private:
  void grow(int max_n) const {
    for (int n = static_cast<int>(rows_.size()); n <= max_n; ++n) {
      std::vector<BigInt> row(static_cast<std::size_t>(n) + 1);
      row[0] = (n == 0) ? 1 : 0;
      for (int k = 1; k <= n; ++k)
        row[static_cast<std::size_t>(k)] =
            rows_[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
            k * stirling_or_zero(n - 1, k);
      rows_.push_back(std::move(row));
    }
  }

  BigInt stirling_or_zero(int n, int k) const {
    if (k > n) return 0;
    return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
  }

  mutable std::mutex mu_;
  mutable std::vector<std::vector<BigInt>> rows_;
};

inline StirlingTable& stirling_table() {
  static StirlingTable table;
  return table;
}

inline BigInt stirling2(int n, int k) { return stirling_table().value(n, k); }

namespace detail {

inline BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: negative argument");
  BigInt out = 1;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

inline BigInt binomial(int n, int k) {
  if (n < 0) throw std::invalid_argument("binomial: negative n");
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt out = 1;
  for (int i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;  // exact at every step: out is C(n-k+i, i)
  }
  return out;
}

// n * (n-1) * ... * (n-j+1)
inline BigInt falling_factorial(int n, int j) {
  if (j < 0) throw std::invalid_argument("falling_factorial: negative length");
  BigInt out = 1;
  for (int i = 0; i < j; ++i) out *= n - i;
  return out;
}

// Number of functions from an r-set to l labeled bins that hit every bin of a
// fixed e-subset (inclusion-exclusion over the missed bins).
inline BigInt cover_count(int r, int l, int e) {
  if (r < 0 || l < 0 || e < 0 || e > l)
    throw std::invalid_argument("cover_count: bad arguments");
  BigInt out = 0;
  for (int t = 0; t <= e; ++t) {
    BigInt term = binomial(e, t) * pow_int(l - t, static_cast<std::uint64_t>(r));
    out += (t % 2 == 0) ? term : -term;
  }
  return out;
}

}  // namespace detail

// Number of onto functions from an n-set to a k-set, k! * S(n,k).
inline BigInt surjection_count(int n, int k) {
  if (n < 0 || k < 0) throw std::invalid_argument("surjection_count: negative argument");
  return detail::factorial(k) * stirling2(n, k);
}

// Probability that passenger 1 travels alone when m passengers are seated on
// i buses, all nonempty: S(m-1, i-1) / S(m, i).
inline Rational lonely_first_prob_ne(int m, int i) {
  if (m < 1 || i < 1) throw std::invalid_argument("lonely_first_prob_ne: arguments must be >= 1");
  if (i > m) throw std::invalid_argument("lonely_first_prob_ne: no surjection with i > m");
  return Rational(stirling2(m - 1, i - 1), stirling2(m, i));
}

// S(n-1,k-1)/S(n,k) <= S(n-1,k)/S(n,k+1), checked by cross-multiplication so
// a zero S(n,k+1) needs no special casing.
inline bool check_stirling_ratio_inequality(int n, int k) {
  if (k < 1 || k >= n) throw std::invalid_argument("check_stirling_ratio_inequality: need 1 <= k < n");
  return stirling2(n - 1, k - 1) * stirling2(n, k + 1) <= stirling2(n - 1, k) * stirling2(n, k);
}

// Newton's inequality at index k for the coefficient list a_1..a_m of a
// real-rooted polynomial: a_{k-1} a_{k+1} C(m,k)^2 <= a_k^2 C(m,k-1) C(m,k+1).
inline bool check_newton_inequality(const std::vector<BigInt>& coeffs, int k) {
  const int m = static_cast<int>(coeffs.size());
  if (m < 3) throw std::out_of_range("check_newton_inequality: need at least 3 coefficients");
  if (k <= 1 || k >= m) throw std::out_of_range("check_newton_inequality: index k out of range");
  const BigInt& a_prev = coeffs[static_cast<std::size_t>(k - 2)];
  const BigInt& a_k = coeffs[static_cast<std::size_t>(k - 1)];
  const BigInt& a_next = coeffs[static_cast<std::size_t>(k)];
  const BigInt c_k = detail::binomial(m, k);
  return a_prev * a_next * c_k * c_k <= a_k * a_k * detail::binomial(m, k - 1) * detail::binomial(m, k + 1);
}

// Coefficients S(n,1), ..., S(n,n) of the n-th Touchard polynomial.
inline std::vector<BigInt> touchard_row(int n) {
  if (n < 1) throw std::invalid_argument("touchard_row: need n >= 1");
  std::vector<BigInt> row;
  row.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) row.push_back(stirling2(n, k));
  return row;
}

// Number of functions from an m-set to b labeled bins with no bin of size
// exactly 1 (inclusion-exclusion over the set of singleton bins).
inline BigInt no_singleton_count(int m, int b) {
  if (m < 0 || b < 0) throw std::invalid_argument("no_singleton_count: negative argument");
  BigInt out = 0;
  const int top = std::min(m, b);
  for (int i = 0; i <= top; ++i) {
    BigInt term = detail::binomial(b, i) * detail::binomial(m, i) * detail::factorial(i) *
                  pow_int(b - i, static_cast<std::uint64_t>(m - i));
    out += (i % 2 == 0) ? term : -term;
  }
  return out;
}

// Number of configurations of n passengers on k buses with exactly j lonely
// passengers: pick the lonely passengers and their distinct buses, then seat
// the rest with no further singletons.
inline BigInt lonely_count_configs(int n, int k, int j) {
  if (j < 0 || j > n || j > k) throw std::invalid_argument("lonely_count_configs: need 0 <= j <= min(n,k)");
  return detail::binomial(n, j) * detail::falling_factorial(k, j) * no_singleton_count(n - j, k - j);
}

}  // namespace lonely
