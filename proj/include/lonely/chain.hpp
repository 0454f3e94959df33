#pragma once

#include <compare>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lonely/combinatorics.hpp"
#include "lonely/dist.hpp"

namespace lonely {

// Joint state of the arrival process: after m arrivals, n_buses buses are
// occupied and `lonely` of them carry exactly one passenger.
struct PairState {
  int m = 0;
  int n_buses = 0;
  int lonely = 0;
  auto operator<=>(const PairState&) const = default;
};

// Reachability: every occupied non-lonely bus holds at least two passengers.
inline bool pair_state_valid(const PairState& s, int k) {
  return 0 <= s.lonely && s.lonely <= s.n_buses && s.n_buses <= s.m && s.n_buses <= k &&
         s.m >= 2 * s.n_buses - s.lonely;
}

// Time-indexed nonempty-bus or lonely-passenger counts, one entry per arrival
// plus the initial 0.
using Path = std::vector<int>;

// A lock-step pair of occupied-count and lonely-count paths from one run.
struct PathPair {
  Path nonempty;
  Path lonely;
  auto operator<=>(const PathPair&) const = default;
};

// P(next arrival opens a new bus | i of k buses occupied) = (k - i)/k.
inline Rational forward_birth_prob(int k, int i) {
  if (k < 1) throw std::invalid_argument("forward_birth_prob: need k >= 1");
  if (i < 0 || i > k) throw std::invalid_argument("forward_birth_prob: need 0 <= i <= k");
  return Rational(k - i, k);
}

// One arrival in the k-bus model: a fresh bus adds a lonely passenger, a
// lonely bus loses its singleton, a crowded bus changes nothing.
inline ExactDist<PairState> pair_step_dist(int k, const PairState& s) {
  if (k < 1 || !pair_state_valid(s, k)) throw std::invalid_argument("pair_step_dist: invalid state");
  ExactDist<PairState> d;
  d.add({s.m + 1, s.n_buses + 1, s.lonely + 1}, Rational(k - s.n_buses, k));
  d.add({s.m + 1, s.n_buses, s.lonely - 1}, Rational(s.lonely, k));
  d.add({s.m + 1, s.n_buses, s.lonely}, Rational(s.n_buses - s.lonely, k));
  return d;
}

// Exact joint law of (N_m, L_m) for m = 0..n, by sparse dynamic programming
// over reachable (N, L) pairs.
inline std::vector<ExactDist<PairState>> joint_dist_slices(int n, int k) {
  if (n < 0 || k < 1) throw std::invalid_argument("joint_dist_slices: need n >= 0, k >= 1");
  std::vector<ExactDist<PairState>> slices;
  slices.reserve(static_cast<std::size_t>(n) + 1);
  slices.push_back(ExactDist<PairState>::point({0, 0, 0}));
  for (int m = 0; m < n; ++m) {
    ExactDist<PairState> next;
    for (const auto& [s, p] : slices.back().masses()) {
      next.add({s.m + 1, s.n_buses + 1, s.lonely + 1}, p * Rational(k - s.n_buses, k));
      next.add({s.m + 1, s.n_buses, s.lonely - 1}, p * Rational(s.lonely, k));
      next.add({s.m + 1, s.n_buses, s.lonely}, p * Rational(s.n_buses - s.lonely, k));
    }
    slices.push_back(std::move(next));
  }
  return slices;
}

inline ExactDist<PairState> exact_joint_dist(int n, int k) {
  return joint_dist_slices(n, k).back();
}

inline ExactDist<int> lonely_marginal(const ExactDist<PairState>& d) {
  return d.map([](const PairState& s) { return s.lonely; });
}

inline ExactDist<int> nonempty_marginal(const ExactDist<PairState>& d) {
  return d.map([](const PairState& s) { return s.n_buses; });
}

// Probability that at least one of n passengers travels alone on k buses.
inline Rational p_lonely(int n, int k) {
  if (n < 1 || k < 1) throw std::invalid_argument("p_lonely: need n >= 1, k >= 1");
  return 1 - lonely_marginal(exact_joint_dist(n, k)).mass(0);
}

// Probability the reversed occupied-bus chain steps i -> i-1 at time m, i.e.
// that the m-th arrival opened a bus given i buses are occupied. By exchange
// of passengers this is the chance a fixed passenger rides alone, so it
// depends on (m, i) only: S(m-1, i-1)/S(m, i).
inline Rational reverse_death_prob(int m, int i) {
  if (m < 1 || i < 1) throw std::invalid_argument("reverse_death_prob: need m >= 1, i >= 1");
  if (i > m) throw std::invalid_argument("reverse_death_prob: need i <= m");
  return lonely_first_prob_ne(m, i);
}

// Conditional probability that passenger 1 keeps riding alone given the
// occupied-bus-count path: one factor per arrival that joins an occupied bus.
inline Rational lonely_survival_product(const Path& path) {
  if (path.size() < 2 || path[0] != 0 || path[1] != 1)
    throw std::invalid_argument("lonely_survival_product: path must start 0, 1");
  Rational out = 1;
  for (std::size_t m = 2; m < path.size(); ++m) {
    const int step = path[m] - path[m - 1];
    if (step != 0 && step != 1)
      throw std::invalid_argument("lonely_survival_product: not a pure birth path");
    if (step == 0) out *= Rational(path[m] - 1, path[m]);
  }
  return out;
}

// Exact law of the occupied-bus-count path in the unconditioned k-bus model.
// Intended for small n; the support has up to 2^(n-1) paths.
inline ExactDist<Path> birth_path_law(int n, int k) {
  if (n < 0 || k < 1) throw std::invalid_argument("birth_path_law: need n >= 0, k >= 1");
  ExactDist<Path> law;
  Path path(static_cast<std::size_t>(n) + 1, 0);
  auto walk = [&](auto&& self, int m, int i, const Rational& prob) -> void {
    if (m == n) {
      law.add(path, prob);
      return;
    }
    const Rational up = forward_birth_prob(k, i);
    if (up > 0) {
      path[static_cast<std::size_t>(m) + 1] = i + 1;
      self(self, m + 1, i + 1, prob * up);
    }
    if (up < 1) {
      path[static_cast<std::size_t>(m) + 1] = i;
      self(self, m + 1, i, prob * (1 - up));
    }
  };
  walk(walk, 0, 0, 1);
  return law;
}

// The l-bus occupied-count chain conditioned on all l buses being occupied at
// horizon n, realized as an h-transform. h(m, i) = P(N_n = l | N_m = i)
// satisfies the backward recursion h(m,i) = r_i h(m+1,i+1) + (1-r_i) h(m+1,i)
// with r_i = (l-i)/l, and the conditioned one-step birth probability at
// (m, i) is r_i h(m+1, i+1)/h(m, i).
class ConditionedChain {
 public:
  ConditionedChain(int l, int n) : l_(l), n_(n) {
    if (l < 1 || n < l) throw std::invalid_argument("ConditionedChain: need 1 <= l <= n");
    h_.assign(static_cast<std::size_t>(n) + 1, std::vector<Rational>(static_cast<std::size_t>(l) + 1, 0));
    h_[static_cast<std::size_t>(n)][static_cast<std::size_t>(l)] = 1;
    for (int m = n - 1; m >= 0; --m)
      for (int i = 0; i <= l; ++i) {
        const Rational r = forward_birth_prob(l, i);
        const Rational up = (i < l) ? h_[idx(m + 1)][idx(i + 1)] : Rational(0);
        h_[idx(m)][idx(i)] = r * up + (1 - r) * h_[idx(m + 1)][idx(i)];
      }
  }

  int buses() const { return l_; }
  int horizon() const { return n_; }

  const Rational& h(int m, int i) const {
    if (m < 0 || m > n_ || i < 0 || i > l_) throw std::invalid_argument("ConditionedChain::h: out of range");
    return h_[idx(m)][idx(i)];
  }

  Rational birth_prob(int m, int i) const {
    if (m < 0 || m >= n_) throw std::invalid_argument("ConditionedChain::birth_prob: need 0 <= m < horizon");
    const Rational& hmi = h(m, i);
    if (hmi == 0) throw std::domain_error("ConditionedChain: conditioning on a null state");
    if (i == l_) return 0;
    return forward_birth_prob(l_, i) * h_[idx(m + 1)][idx(i + 1)] / hmi;
  }

  // Law of the conditioned occupied count at time m (h-transform route; the
  // closed-form counting route is ne_nonempty_dist below).
  ExactDist<int> nonempty_dist(int m) const {
    if (m < 0 || m > n_) throw std::invalid_argument("ConditionedChain::nonempty_dist: out of range");
    ExactDist<int> cur = ExactDist<int>::point(0);
    for (int t = 0; t < m; ++t) {
      ExactDist<int> next;
      for (const auto& [i, p] : cur.masses()) {
        const Rational up = birth_prob(t, i);
        next.add(i + 1, p * up);
        next.add(i, p * (1 - up));
      }
      cur = std::move(next);
    }
    return cur;
  }

  // Exact law of the full occupied-count path; support C(n-1, l-1) paths.
  ExactDist<Path> path_law() const {
    ExactDist<Path> law;
    Path path(static_cast<std::size_t>(n_) + 1, 0);
    auto walk = [&](auto&& self, int m, int i, const Rational& prob) -> void {
      if (m == n_) {
        law.add(path, prob);
        return;
      }
      const Rational up = birth_prob(m, i);
      if (up > 0) {
        path[static_cast<std::size_t>(m) + 1] = i + 1;
        self(self, m + 1, i + 1, prob * up);
      }
      if (up < 1) {
        path[static_cast<std::size_t>(m) + 1] = i;
        self(self, m + 1, i, prob * (1 - up));
      }
    };
    walk(walk, 0, 0, 1);
    return law;
  }

  // Joint (occupied, lonely) law under the conditioned seating construction:
  // when the occupied count grows the new passenger is lonely; otherwise the
  // arrival picks one of the i occupied buses uniformly and removes a
  // singleton with probability L/i.
  std::vector<ExactDist<PairState>> pair_slices() const {
    std::vector<ExactDist<PairState>> slices;
    slices.reserve(static_cast<std::size_t>(n_) + 1);
    slices.push_back(ExactDist<PairState>::point({0, 0, 0}));
    for (int t = 0; t < n_; ++t) {
      ExactDist<PairState> next;
      for (const auto& [s, p] : slices.back().masses()) {
        const Rational up = birth_prob(t, s.n_buses);
        next.add({s.m + 1, s.n_buses + 1, s.lonely + 1}, p * up);
        const Rational stay_mass = p * (1 - up);
        if (stay_mass > 0) {
          next.add({s.m + 1, s.n_buses, s.lonely - 1}, stay_mass * Rational(s.lonely, s.n_buses));
          next.add({s.m + 1, s.n_buses, s.lonely}, stay_mass * Rational(s.n_buses - s.lonely, s.n_buses));
        }
      }
      slices.push_back(std::move(next));
    }
    return slices;
  }

  ExactDist<int> final_lonely_dist() const { return lonely_marginal(pair_slices().back()); }

  // Exact joint law of the (occupied-count, lonely-count) path pair. Support
  // grows like 3^n; intended for small n.
  ExactDist<PathPair> pair_path_law() const {
    ExactDist<PathPair> law;
    PathPair cur{Path(static_cast<std::size_t>(n_) + 1, 0), Path(static_cast<std::size_t>(n_) + 1, 0)};
    auto walk = [&](auto&& self, int t, int i, int lone, const Rational& prob) -> void {
      if (t == n_) {
        law.add(cur, prob);
        return;
      }
      const std::size_t pos = static_cast<std::size_t>(t) + 1;
      const Rational up = birth_prob(t, i);
      if (up > 0) {
        cur.nonempty[pos] = i + 1;
        cur.lonely[pos] = lone + 1;
        self(self, t + 1, i + 1, lone + 1, prob * up);
      }
      const Rational stay_mass = 1 - up;
      if (stay_mass > 0) {
        cur.nonempty[pos] = i;
        if (lone > 0) {
          cur.lonely[pos] = lone - 1;
          self(self, t + 1, i, lone - 1, prob * stay_mass * Rational(lone, i));
        }
        if (i > lone) {
          cur.lonely[pos] = lone;
          self(self, t + 1, i, lone, prob * stay_mass * Rational(i - lone, i));
        }
      }
    };
    walk(walk, 0, 0, 0, 1);
    return law;
  }

 private:
  static std::size_t idx(int v) { return static_cast<std::size_t>(v); }

  int l_;
  int n_;
  std::vector<std::vector<Rational>> h_;
};

// P(N_n = l | N_m = i) for the l-bus occupied-count chain.
inline Rational h_value(int l, int n, int m, int i) {
  return ConditionedChain(l, n).h(m, i);
}

// P(conditioned chain steps i -> i+1 at time m); rejects null conditioning.
inline Rational conditioned_birth_prob(int l, int n, int m, int i) {
  return ConditionedChain(l, n).birth_prob(m, i);
}

// Closed-form law of the conditioned occupied count at time m, by counting
// surjections according to how many buses the first m arrivals occupy. The
// h-transform route above must agree exactly; keeping both gives a two-route
// consistency check.
inline ExactDist<int> ne_nonempty_dist(int l, int n, int m) {
  if (l < 1 || l > n) throw std::invalid_argument("ne_nonempty_dist: need 1 <= l <= n");
  if (m < 0 || m > n) throw std::invalid_argument("ne_nonempty_dist: need 0 <= m <= n");
  const BigInt denom = surjection_count(n, l);
  ExactDist<int> out;
  for (int i = 0; i <= std::min(m, l); ++i) {
    const BigInt count = detail::binomial(l, i) * detail::factorial(i) * stirling2(m, i) *
                         detail::cover_count(n - m, l, l - i);
    out.add(i, Rational(count, denom));
  }
  return out;
}

}  // namespace lonely
