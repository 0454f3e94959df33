#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lonely/chain.hpp"
#include "lonely/combinatorics.hpp"
#include "lonely/dist.hpp"

namespace lonely {

// How the law `a` relates to the law `b` in the usual stochastic order.
// strict: a dominates b and the laws differ; equal: same law; dominated: b
// strictly dominates a; incomparable: the tail inequalities point both ways.
// weak_only is the remaining case, a >= b everywhere with equality of laws
// excluded elsewhere; it cannot occur for distributions compared here but the
// verdict type is kept total.
enum class Relation { strict, weak_only, equal, dominated, incomparable };

inline const char* relation_name(Relation r) {
  switch (r) {
    case Relation::strict: return "strict";
    case Relation::weak_only: return "weak-only";
    case Relation::equal: return "equal";
    case Relation::dominated: return "dominated";
    case Relation::incomparable: return "incomparable";
  }
  throw std::invalid_argument("relation_name: bad enum value");
}

struct DominanceVerdict {
  Relation relation = Relation::equal;
  // Smallest u with a strict tail inequality, when one exists.
  std::optional<long long> witness_u;
};

namespace detail {

// Evaluate P(X >= u) for both laws at every u in the union of supports.
// Returns {all a-tails >= b-tails, all <=, smallest u with a strict > }.
struct TailScan {
  bool ge_everywhere = true;
  bool le_everywhere = true;
  std::optional<long long> first_strict_gt;
  std::optional<long long> first_strict_lt;
};

inline TailScan scan_tails(const ExactDist<int>& a, const ExactDist<int>& b) {
  std::vector<long long> grid;
  for (const auto& [v, p] : a.masses()) grid.push_back(v);
  for (const auto& [v, p] : b.masses()) grid.push_back(v);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  TailScan scan;
  for (long long u : grid) {
    const Rational ta = tail_ge(a, u);
    const Rational tb = tail_ge(b, u);
    if (ta < tb) {
      scan.ge_everywhere = false;
      if (!scan.first_strict_lt) scan.first_strict_lt = u;
    } else if (ta > tb) {
      scan.le_everywhere = false;
      if (!scan.first_strict_gt) scan.first_strict_gt = u;
    }
  }
  return scan;
}

}  // namespace detail

// True iff P(a >= u) >= P(b >= u) for every threshold u.
inline bool weakly_dominates(const ExactDist<int>& a, const ExactDist<int>& b) {
  a.require_normalized("weakly_dominates: left");
  b.require_normalized("weakly_dominates: right");
  return detail::scan_tails(a, b).ge_everywhere;
}

// Full classification with a witness threshold where the order is strict.
inline DominanceVerdict cdf_dominates(const ExactDist<int>& a, const ExactDist<int>& b) {
  a.require_normalized("cdf_dominates: left");
  b.require_normalized("cdf_dominates: right");
  const auto scan = detail::scan_tails(a, b);
  DominanceVerdict v;
  if (scan.ge_everywhere && scan.le_everywhere) {
    v.relation = Relation::equal;
  } else if (scan.ge_everywhere) {
    v.relation = Relation::strict;
    v.witness_u = scan.first_strict_gt;
  } else if (scan.le_everywhere) {
    v.relation = Relation::dominated;
    v.witness_u = scan.first_strict_lt;
  } else {
    v.relation = Relation::incomparable;
    v.witness_u = scan.first_strict_gt;
  }
  return v;
}

// Two probabilities with denominators k^n and (k+1)^n in lowest terms can
// only coincide when both are 0 or both are 1: the denominators are coprime,
// so a common value must be an integer. Hence weak dominance of the lonely
// counts at consecutive k is automatically strict once any tail probability
// is nondegenerate. Inputs must be events over the respective configuration
// spaces, i.e. have denominators dividing k^n and (k+1)^n.
inline bool distinct_unless_trivial(const Rational& pa, const Rational& pb, int k, std::uint64_t n) {
  if (k < 1) throw std::invalid_argument("distinct_unless_trivial: need k >= 1");
  if (pow_int(k, n) % denominator(pa) != 0)
    throw std::invalid_argument("distinct_unless_trivial: left denominator does not divide k^n");
  if (pow_int(k + 1, n) % denominator(pb) != 0)
    throw std::invalid_argument("distinct_unless_trivial: right denominator does not divide (k+1)^n");
  const bool trivial = (pa == 0 && pb == 0) || (pa == 1 && pb == 1);
  return trivial || pa != pb;
}

struct TheoremCell {
  int n = 0;
  int k = 0;
  Relation relation = Relation::equal;
  Rational p_lo;  // P(some passenger rides alone) with k buses
  Rational p_hi;  // same with k+1 buses
  std::optional<long long> witness_u;
};

struct TheoremReport {
  std::vector<TheoremCell> cells;
  bool all_strict = true;
  bool p_monotone = true;  // p_hi > p_lo in every cell with n > 1
};

// Check, over the grid 2 <= n <= n_max and 1 <= k < k_max, that the lonely
// count with k+1 buses strictly dominates the one with k buses and that the
// probability of a lonely passenger strictly increases in k.
inline TheoremReport verify_theorem(int n_max, int k_max) {
  if (n_max < 2 || k_max < 1) throw std::invalid_argument("verify_theorem: need n_max >= 2, k_max >= 1");
  TheoremReport report;
  for (int n = 2; n <= n_max; ++n) {
    for (int k = 1; k < k_max; ++k) {
      const ExactDist<int> lo = lonely_marginal(exact_joint_dist(n, k));
      const ExactDist<int> hi = lonely_marginal(exact_joint_dist(n, k + 1));
      const DominanceVerdict verdict = cdf_dominates(hi, lo);
      TheoremCell cell;
      cell.n = n;
      cell.k = k;
      cell.relation = verdict.relation;
      cell.witness_u = verdict.witness_u;
      cell.p_lo = 1 - lo.mass(0);
      cell.p_hi = 1 - hi.mass(0);
      if (verdict.relation != Relation::strict) report.all_strict = false;
      if (!(cell.p_hi > cell.p_lo)) report.p_monotone = false;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace lonely
