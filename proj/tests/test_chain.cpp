#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "lonely/chain.hpp"
#include "test_support.hpp"

using lonely::BigInt;
using lonely::ConditionedChain;
using lonely::ExactDist;
using lonely::PairState;
using lonely::Path;
using lonely::PathPair;
using lonely::Rational;

namespace {

// Independent route: enumerate all k^n equally likely configurations and
// tally the occupancy pair after each prefix length.
std::map<std::pair<int, int>, std::uint64_t> brute_pair_counts(int n, int k) {
  std::map<std::pair<int, int>, std::uint64_t> counts;
  ref::for_each_function(n, k, [&](const std::vector<int>& config) {
    const auto occ = ref::occupancy(config, k);
    ++counts[{occ.nonempty, occ.lonely}];
  });
  return counts;
}

}  // namespace

TEST_CASE("pair_step_dist moves one passenger", "[chain]") {
  const auto first = lonely::pair_step_dist(2, {0, 0, 0});
  REQUIRE(first == ExactDist<PairState>::point({1, 1, 1}));

  const auto from_full = lonely::pair_step_dist(2, {2, 1, 1});
  REQUIRE(from_full.mass({3, 2, 2}) == Rational(1, 2));
  REQUIRE(from_full.mass({3, 1, 0}) == Rational(1, 2));
  REQUIRE(from_full.masses().size() == 2);  // the zero-mass stay is dropped

  const auto three_way = lonely::pair_step_dist(3, {3, 2, 1});
  REQUIRE(three_way.mass({4, 3, 2}) == Rational(1, 3));
  REQUIRE(three_way.mass({4, 2, 0}) == Rational(1, 3));
  REQUIRE(three_way.mass({4, 2, 1}) == Rational(1, 3));

  REQUIRE_THROWS_AS(lonely::pair_step_dist(2, {1, 2, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::pair_step_dist(2, {2, 1, 2}), std::invalid_argument);
}

TEST_CASE("forward_birth_prob", "[chain]") {
  REQUIRE(lonely::forward_birth_prob(4, 0) == 1);
  REQUIRE(lonely::forward_birth_prob(4, 4) == 0);
  REQUIRE(lonely::forward_birth_prob(4, 1) == Rational(3, 4));
  REQUIRE_THROWS_AS(lonely::forward_birth_prob(0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::forward_birth_prob(4, 5), std::invalid_argument);
}

TEST_CASE("exact_joint_dist matches configuration enumeration", "[chain]") {
  REQUIRE(lonely::exact_joint_dist(1, 3) == ExactDist<PairState>::point({1, 1, 1}));

  const auto d32 = lonely::exact_joint_dist(3, 2);
  REQUIRE(d32.mass({3, 1, 0}) == Rational(1, 4));
  REQUIRE(d32.mass({3, 2, 1}) == Rational(3, 4));
  REQUIRE(d32.masses().size() == 2);

  for (int n = 0; n <= 6; ++n)
    for (int k = 1; k <= 4; ++k) {
      const auto dist = lonely::exact_joint_dist(n, k);
      REQUIRE(dist.is_normalized());
      const auto counts = brute_pair_counts(n, k);
      const BigInt denom = lonely::pow_int(k, static_cast<std::uint64_t>(n));
      REQUIRE(dist.masses().size() == counts.size());
      for (const auto& [state, prob] : dist.masses()) {
        REQUIRE(state.m == n);
        REQUIRE(lonely::pair_state_valid(state, k));
        const auto it = counts.find({state.n_buses, state.lonely});
        REQUIRE(it != counts.end());
        REQUIRE(prob == Rational(BigInt(it->second), denom));
      }
    }
}

TEST_CASE("slices stay normalized and respect state bounds", "[chain]") {
  const auto slices = lonely::joint_dist_slices(8, 3);
  REQUIRE(slices.size() == 9);
  for (int m = 0; m < static_cast<int>(slices.size()); ++m) {
    REQUIRE(slices[static_cast<std::size_t>(m)].is_normalized());
    for (const auto& [state, prob] : slices[static_cast<std::size_t>(m)].masses()) {
      REQUIRE(state.m == m);
      REQUIRE(lonely::pair_state_valid(state, 3));
      if (state.lonely == m) REQUIRE(state.n_buses == m);
    }
  }
}

TEST_CASE("nonempty marginal has the binomial-surjection form", "[chain]") {
  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k <= 5; ++k) {
      const auto marg = lonely::nonempty_marginal(lonely::exact_joint_dist(n, k));
      const BigInt denom = lonely::pow_int(k, static_cast<std::uint64_t>(n));
      for (const auto& [i, prob] : marg.masses())
        REQUIRE(prob == Rational(ref::binomial(k, i) * lonely::surjection_count(n, i), denom));
    }
}

TEST_CASE("p_lonely reference values", "[chain]") {
  REQUIRE(lonely::p_lonely(3, 2) == Rational(3, 4));
  REQUIRE(lonely::p_lonely(3, 3) == Rational(8, 9));
  REQUIRE(lonely::p_lonely(1, 1) == 1);
  REQUIRE(lonely::p_lonely(2, 3) == Rational(2, 3));  // lonely iff the two split
  REQUIRE(lonely::p_lonely(4, 1) == 0);
  REQUIRE_THROWS_AS(lonely::p_lonely(0, 2), std::invalid_argument);
}

TEST_CASE("h transform boundary and recursion", "[chain]") {
  REQUIRE(lonely::h_value(2, 3, 1, 1) == Rational(3, 4));
  REQUIRE(lonely::h_value(2, 3, 3, 2) == 1);
  REQUIRE(lonely::h_value(2, 3, 3, 1) == 0);

  for (int n = 1; n <= 9; ++n)
    for (int l = 1; l <= n; ++l) {
      const ConditionedChain chain(l, n);
      REQUIRE(chain.h(1, 1) > 0);  // conditioning event is reachable
      for (int m = 1; m < n; ++m)
        for (int i = 1; i <= std::min(m, l); ++i) {
          const Rational r(l - i, l);
          REQUIRE(chain.h(m, i) ==
                  r * (i < l ? chain.h(m + 1, i + 1) : Rational(0)) + (1 - r) * chain.h(m + 1, i));
        }
    }
}

TEST_CASE("conditioned birth probabilities", "[chain]") {
  REQUIRE(lonely::conditioned_birth_prob(2, 3, 1, 1) == Rational(2, 3));
  // One step before the horizon with one bus missing, the birth is forced.
  REQUIRE(lonely::conditioned_birth_prob(3, 5, 4, 2) == 1);
  // Conditioning on all-distinct buses forces every step upward.
  for (int m = 1; m < 5; ++m) REQUIRE(lonely::conditioned_birth_prob(5, 5, m, m) == 1);
  // At the target level no further birth can happen.
  REQUIRE(lonely::conditioned_birth_prob(2, 4, 2, 2) == 0);
  // States with h = 0 carry no conditional law.
  REQUIRE(lonely::h_value(2, 3, 2, 0) == 0);
  REQUIRE_THROWS_AS(lonely::conditioned_birth_prob(2, 3, 2, 0), std::domain_error);
  REQUIRE_THROWS_AS(ConditionedChain(3, 2), std::invalid_argument);
}

TEST_CASE("nonempty distribution closed form agrees with the transform", "[chain]") {
  const auto ne232 = lonely::ne_nonempty_dist(2, 3, 2);
  REQUIRE(ne232.mass(1) == Rational(1, 3));
  REQUIRE(ne232.mass(2) == Rational(2, 3));

  for (int n = 1; n <= 8; ++n)
    for (int l = 1; l <= n; ++l) {
      const ConditionedChain chain(l, n);
      for (int m = 0; m <= n; ++m) {
        const auto closed = lonely::ne_nonempty_dist(l, n, m);
        REQUIRE(closed.is_normalized());
        REQUIRE(closed == chain.nonempty_dist(m));
      }
      REQUIRE(lonely::ne_nonempty_dist(l, n, 0) == ExactDist<int>::point(0));
      REQUIRE(lonely::ne_nonempty_dist(l, n, n) == ExactDist<int>::point(l));
    }
  REQUIRE_THROWS_AS(lonely::ne_nonempty_dist(3, 2, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::ne_nonempty_dist(2, 3, 4), std::invalid_argument);
}

TEST_CASE("reverse death probabilities", "[chain]") {
  REQUIRE(lonely::reverse_death_prob(1, 1) == 1);
  REQUIRE(lonely::reverse_death_prob(2, 2) == 1);
  REQUIRE(lonely::reverse_death_prob(3, 2) == Rational(1, 3));
  for (int m = 2; m <= 30; ++m) REQUIRE(lonely::reverse_death_prob(m, 1) == 0);
  REQUIRE_THROWS_AS(lonely::reverse_death_prob(2, 3), std::invalid_argument);
}

TEST_CASE("survival product over birth paths", "[chain]") {
  REQUIRE(lonely::lonely_survival_product({0, 1, 2, 3}) == 1);
  REQUIRE(lonely::lonely_survival_product({0, 1, 1}) == 0);
  REQUIRE(lonely::lonely_survival_product({0, 1, 2, 2}) == Rational(1, 2));
  REQUIRE_THROWS_AS(lonely::lonely_survival_product({0, 2}), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::lonely_survival_product({1, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::lonely_survival_product({0, 1, 3}), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::lonely_survival_product({0, 1, 2, 1}), std::invalid_argument);
  REQUIRE_THROWS_AS(lonely::lonely_survival_product({0}), std::invalid_argument);
}

TEST_CASE("unconditioned birth path law", "[chain]") {
  const auto law = lonely::birth_path_law(3, 2);
  REQUIRE(law.mass(Path{0, 1, 2, 2}) == Rational(1, 2));
  REQUIRE(law.mass(Path{0, 1, 1, 2}) == Rational(1, 4));
  REQUIRE(law.mass(Path{0, 1, 1, 1}) == Rational(1, 4));
  REQUIRE(law.masses().size() == 3);

  for (int n = 1; n <= 7; ++n)
    for (int k = 1; k <= 4; ++k) {
      const auto paths = lonely::birth_path_law(n, k);
      REQUIRE(paths.is_normalized());
      // The endpoint marginal must reproduce the occupied-bus marginal.
      const auto endpoint = paths.map([](const Path& p) { return p.back(); });
      REQUIRE(endpoint == lonely::nonempty_marginal(lonely::exact_joint_dist(n, k)));
    }
}

TEST_CASE("conditioned path law", "[chain]") {
  for (int n = 2; n <= 8; ++n)
    for (int l = 1; l <= n; ++l) {
      const ConditionedChain chain(l, n);
      const auto law = chain.path_law();
      REQUIRE(law.is_normalized());
      REQUIRE(BigInt(law.masses().size()) == ref::binomial(n - 1, l - 1));
      for (const auto& [path, prob] : law.masses()) {
        REQUIRE(path.size() == static_cast<std::size_t>(n) + 1);
        REQUIRE(path.back() == l);
      }
      // Averaging the survival product recovers the lonely-first probability.
      Rational mean = 0;
      for (const auto& [path, prob] : law.masses())
        mean += prob * lonely::lonely_survival_product(path);
      REQUIRE(mean == lonely::lonely_first_prob_ne(n, l));
    }
}

TEST_CASE("conditioned pair chain", "[chain]") {
  // Three passengers filling two buses always leave exactly one passenger alone.
  REQUIRE(ConditionedChain(2, 3).final_lonely_dist() == ExactDist<int>::point(1));
  // All-distinct conditioning leaves everyone alone.
  REQUIRE(ConditionedChain(4, 4).final_lonely_dist() == ExactDist<int>::point(4));

  const auto pairs23 = ConditionedChain(2, 3).pair_path_law();
  REQUIRE(pairs23.mass({Path{0, 1, 2, 2}, Path{0, 1, 2, 1}}) == Rational(2, 3));
  REQUIRE(pairs23.mass({Path{0, 1, 1, 2}, Path{0, 1, 0, 1}}) == Rational(1, 3));
  REQUIRE(pairs23.masses().size() == 2);

  for (int n = 2; n <= 7; ++n)
    for (int l = 1; l <= n; ++l) {
      const ConditionedChain chain(l, n);
      const auto slices = chain.pair_slices();
      REQUIRE(slices.size() == static_cast<std::size_t>(n) + 1);
      for (int m = 0; m <= n; ++m) {
        REQUIRE(slices[static_cast<std::size_t>(m)].is_normalized());
        // The bus-count coordinate of the pair slices must match the plain
        // conditioned marginal.
        REQUIRE(lonely::nonempty_marginal(slices[static_cast<std::size_t>(m)]) ==
                chain.nonempty_dist(m));
      }
      const auto pair_law = chain.pair_path_law();
      REQUIRE(pair_law.is_normalized());
      const auto lonely_ends = pair_law.map([](const PathPair& p) { return p.lonely.back(); });
      REQUIRE(lonely_ends == chain.final_lonely_dist());
      const auto nonempty_paths = pair_law.map([](const PathPair& p) { return p.nonempty; });
      REQUIRE(nonempty_paths == chain.path_law());
    }
}
