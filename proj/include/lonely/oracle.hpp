#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lonely/chain.hpp"

namespace lonely {

// A full assignment of passengers to buses; labels are 1-based.
using Configuration = std::vector<int>;

inline int nonempty_count(const Configuration& config, int k) {
  if (k < 1) throw std::invalid_argument("nonempty_count: need k >= 1");
  std::vector<int> occ(static_cast<std::size_t>(k), 0);
  for (int b : config) {
    if (b < 1 || b > k) throw std::invalid_argument("nonempty_count: bus label out of range");
    ++occ[static_cast<std::size_t>(b) - 1];
  }
  int nb = 0;
  for (int c : occ) nb += c > 0 ? 1 : 0;
  return nb;
}

inline int lonely_count(const Configuration& config, int k) {
  if (k < 1) throw std::invalid_argument("lonely_count: need k >= 1");
  std::vector<int> occ(static_cast<std::size_t>(k), 0);
  for (int b : config) {
    if (b < 1 || b > k) throw std::invalid_argument("lonely_count: bus label out of range");
    ++occ[static_cast<std::size_t>(b) - 1];
  }
  int lone = 0;
  for (int c : occ) lone += c == 1 ? 1 : 0;
  return lone;
}

// Raised when a requested enumeration would exceed the configured ceiling;
// the CLI maps this to its resource-limit exit code.
struct EnumerationLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cap on enumerated configuration counts. Overridable through the
// LONELY_ENUM_LIMIT environment variable, subject to a hard ceiling.
inline std::uint64_t default_enum_limit() {
  constexpr std::uint64_t kDefault = 1'000'000;
  constexpr std::uint64_t kCeiling = 10'000'000;
  const char* env = std::getenv("LONELY_ENUM_LIMIT");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || parsed == 0) return kDefault;
  return parsed < kCeiling ? parsed : kCeiling;
}

namespace detail {

inline std::uint64_t checked_config_count(int n, int k, std::uint64_t limit, const char* who) {
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > limit / static_cast<std::uint64_t>(k)) total = limit + 1;
    else total *= static_cast<std::uint64_t>(k);
    if (total > limit)
      throw EnumerationLimitError(std::string(who) + ": " + std::to_string(k) + "^" +
                                  std::to_string(n) + " exceeds enumeration limit " +
                                  std::to_string(limit));
  }
  return total;
}

}  // namespace detail

// Ground truth for the joint law of (N_m, L_m): walk all k^n bus assignments
// and count prefixes per state, one slice per time m = 0..n. Probabilities
// are formed from integer counts only after the walk.
inline std::vector<ExactDist<PairState>> enumerate_joint(int n, int k,
                                                         std::uint64_t limit = default_enum_limit()) {
  if (n < 0 || k < 1) throw std::invalid_argument("enumerate_joint: need n >= 0, k >= 1");
  detail::checked_config_count(n, k, limit, "enumerate_joint");
  std::vector<std::map<std::pair<int, int>, std::uint64_t>> counts(static_cast<std::size_t>(n) + 1);
  std::vector<int> occ(static_cast<std::size_t>(k), 0);
  auto walk = [&](auto&& self, int m, int nb, int lone) -> void {
    ++counts[static_cast<std::size_t>(m)][{nb, lone}];
    if (m == n) return;
    for (int b = 0; b < k; ++b) {
      const int o = ++occ[static_cast<std::size_t>(b)];
      self(self, m + 1, nb + (o == 1), lone + (o == 1) - (o == 2));
      --occ[static_cast<std::size_t>(b)];
    }
  };
  walk(walk, 0, 0, 0);
  std::vector<ExactDist<PairState>> slices(static_cast<std::size_t>(n) + 1);
  BigInt denom = 1;
  for (int m = 0; m <= n; ++m) {
    for (const auto& [state, c] : counts[static_cast<std::size_t>(m)])
      slices[static_cast<std::size_t>(m)].add({m, state.first, state.second}, Rational(BigInt(c), denom));
    denom *= k;
  }
  return slices;
}

// Permutation-symmetric observables of a configuration. The catalog is
// closed: conditioning on the occupied count is only guaranteed to match
// the uniform surjection model for functionals invariant under relabeling
// buses, so no user-supplied functionals are accepted. Values are encoded
// as integer sequences; scalar functionals yield length-1 sequences.
enum class Functional { n_path, l_path, final_lonely, first_passenger_lonely };

inline const char* functional_name(Functional f) {
  switch (f) {
    case Functional::n_path: return "n-path";
    case Functional::l_path: return "l-path";
    case Functional::final_lonely: return "final-lonely";
    case Functional::first_passenger_lonely: return "first-passenger-lonely";
  }
  throw std::invalid_argument("functional_name: bad enum value");
}

inline constexpr Functional kFunctionalCatalog[] = {
    Functional::n_path, Functional::l_path, Functional::final_lonely,
    Functional::first_passenger_lonely};

// Law of a catalog functional under the k-bus model conditioned on exactly l
// occupied buses at the end, by direct enumeration and filtering.
inline ExactDist<Path> conditioned_law(int n, int k, int l, Functional f,
                                       std::uint64_t limit = default_enum_limit()) {
  if (n < 1 || k < 1 || l < 0) throw std::invalid_argument("conditioned_law: need n >= 1, k >= 1, l >= 0");
  detail::checked_config_count(n, k, limit, "conditioned_law");
  std::map<Path, std::uint64_t> counts;
  std::uint64_t hits = 0;
  std::vector<int> occ(static_cast<std::size_t>(k), 0);
  Path npath(static_cast<std::size_t>(n) + 1, 0);
  Path lpath(static_cast<std::size_t>(n) + 1, 0);
  int first_bus = 0;
  auto walk = [&](auto&& self, int m, int nb, int lone) -> void {
    if (m == n) {
      if (nb != l) return;
      ++hits;
      switch (f) {
        case Functional::n_path: ++counts[npath]; break;
        case Functional::l_path: ++counts[lpath]; break;
        case Functional::final_lonely: ++counts[Path{lone}]; break;
        case Functional::first_passenger_lonely:
          ++counts[Path{occ[static_cast<std::size_t>(first_bus)] == 1 ? 1 : 0}];
          break;
      }
      return;
    }
    for (int b = 0; b < k; ++b) {
      if (m == 0) first_bus = b;
      const int o = ++occ[static_cast<std::size_t>(b)];
      const std::size_t pos = static_cast<std::size_t>(m) + 1;
      npath[pos] = nb + (o == 1);
      lpath[pos] = lone + (o == 1) - (o == 2);
      self(self, m + 1, npath[pos], lpath[pos]);
      --occ[static_cast<std::size_t>(b)];
    }
  };
  walk(walk, 0, 0, 0);
  if (hits == 0) throw std::domain_error("conditioned_law: null conditioning event");
  ExactDist<Path> law;
  for (const auto& [value, c] : counts) law.add(value, Rational(BigInt(c), BigInt(hits)));
  return law;
}

// Law of a catalog functional under the uniform measure on surjective l-bus
// configurations. Identical to conditioning the l-bus model on full
// occupancy, which is exactly what conditioned_law computes at k = l.
inline ExactDist<Path> ne_functional_law(int l, int n, Functional f,
                                         std::uint64_t limit = default_enum_limit()) {
  if (l < 1 || l > n) throw std::invalid_argument("ne_functional_law: need 1 <= l <= n");
  return conditioned_law(n, l, l, f, limit);
}

// Everything the surjective enumeration can say about the conditioned pair
// process, gathered in one pass over Omega(l, n, NE).
struct NeEnumeration {
  int l = 0;
  int n = 0;
  BigInt total;                                  // number of surjective configurations
  std::vector<ExactDist<int>> nonempty_slices;   // law of the occupied count, m = 0..n
  std::vector<ExactDist<PairState>> pair_slices; // joint (occupied, lonely) law, m = 0..n
  ExactDist<Path> nonempty_path_law;
  ExactDist<PathPair> pair_path_law;
};

inline NeEnumeration ne_enumerate(int l, int n, std::uint64_t limit = default_enum_limit()) {
  if (l < 1 || l > n) throw std::invalid_argument("ne_enumerate: need 1 <= l <= n");
  detail::checked_config_count(n, l, limit, "ne_enumerate");
  std::vector<std::map<std::pair<int, int>, std::uint64_t>> slice_counts(static_cast<std::size_t>(n) + 1);
  std::map<Path, std::uint64_t> path_counts;
  std::map<PathPair, std::uint64_t> pair_counts;
  std::uint64_t total = 0;
  std::vector<int> occ(static_cast<std::size_t>(l), 0);
  PathPair cur{Path(static_cast<std::size_t>(n) + 1, 0), Path(static_cast<std::size_t>(n) + 1, 0)};
  auto walk = [&](auto&& self, int m, int nb, int lone) -> void {
    if (l - nb > n - m) return;  // too few arrivals left to occupy every bus
    if (m == n) {
      ++total;
      for (int t = 0; t <= n; ++t) {
        const std::size_t pos = static_cast<std::size_t>(t);
        ++slice_counts[pos][{cur.nonempty[pos], cur.lonely[pos]}];
      }
      ++path_counts[cur.nonempty];
      ++pair_counts[cur];
      return;
    }
    for (int b = 0; b < l; ++b) {
      const int o = ++occ[static_cast<std::size_t>(b)];
      const std::size_t pos = static_cast<std::size_t>(m) + 1;
      cur.nonempty[pos] = nb + (o == 1);
      cur.lonely[pos] = lone + (o == 1) - (o == 2);
      self(self, m + 1, cur.nonempty[pos], cur.lonely[pos]);
      --occ[static_cast<std::size_t>(b)];
    }
  };
  walk(walk, 0, 0, 0);
  NeEnumeration out;
  out.l = l;
  out.n = n;
  out.total = total;
  const BigInt denom(total);
  out.nonempty_slices.resize(static_cast<std::size_t>(n) + 1);
  out.pair_slices.resize(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    const std::size_t pos = static_cast<std::size_t>(m);
    for (const auto& [state, c] : slice_counts[pos]) {
      out.nonempty_slices[pos].add(state.first, Rational(BigInt(c), denom));
      out.pair_slices[pos].add({m, state.first, state.second}, Rational(BigInt(c), denom));
    }
  }
  for (const auto& [path, c] : path_counts) out.nonempty_path_law.add(path, Rational(BigInt(c), denom));
  for (const auto& [pair, c] : pair_counts) out.pair_path_law.add(pair, Rational(BigInt(c), denom));
  return out;
}

// The two conditional probabilities from the warning example: conditioning
// the 3-passenger, 3-bus model on "at most two occupied buses" is not the
// same as conditioning on "only buses 1 and 2 used", as the probability that
// the first two passengers share a bus shows. This exists solely to back the
// dedicated negative check; conditioning on non-symmetric events is
// otherwise unsupported.
struct CautionaryProbs {
  Rational share_given_at_most_two_occupied;
  Rational share_given_buses_one_two;
};

inline CautionaryProbs cautionary_conditioning_probs() {
  const int n = 3;
  const int k = 3;
  std::uint64_t occupancy_cond = 0, occupancy_share = 0;
  std::uint64_t subset_cond = 0, subset_share = 0;
  std::vector<int> bus(static_cast<std::size_t>(n), 0);
  auto walk = [&](auto&& self, int m) -> void {
    if (m == n) {
      int nb = 0;
      bool only_first_two = true;
      for (int b = 0; b < k; ++b) {
        bool used = false;
        for (int p = 0; p < n; ++p) used |= bus[static_cast<std::size_t>(p)] == b;
        nb += used ? 1 : 0;
        if (b >= 2 && used) only_first_two = false;
      }
      const bool share = bus[0] == bus[1];
      if (nb <= 2) {
        ++occupancy_cond;
        occupancy_share += share ? 1 : 0;
      }
      if (only_first_two) {
        ++subset_cond;
        subset_share += share ? 1 : 0;
      }
      return;
    }
    for (int b = 0; b < k; ++b) {
      bus[static_cast<std::size_t>(m)] = b;
      self(self, m + 1);
    }
  };
  walk(walk, 0);
  return {Rational(BigInt(occupancy_share), BigInt(occupancy_cond)),
          Rational(BigInt(subset_share), BigInt(subset_cond))};
}

}  // namespace lonely
