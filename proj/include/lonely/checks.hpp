#pragma once

// Named verification suites shared by the CLI `check` command and the
// acceptance runner. Each suite returns per-item verdicts with a short
// detail string (cell counts on success, the first offending cell on
// failure). Exact suites stay in rational arithmetic end to end; the
// coupling and Monte Carlo suites consume the float summaries produced by
// the mc module.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "lonely/chain.hpp"
#include "lonely/combinatorics.hpp"
#include "lonely/coupling.hpp"
#include "lonely/dominance.hpp"
#include "lonely/mc.hpp"
#include "lonely/oracle.hpp"

namespace lonely::checks {

// Pinned test parameters: goodness-of-fit significance, the Monte Carlo
// sigma budget (documented flake rate about 3e-7 per check), and the seed
// used when a caller does not supply one.
inline constexpr double kGofAlpha = 1e-3;
inline constexpr double kSigmaBudget = 5.0;
inline constexpr std::uint64_t kDefaultSeed = 1729;

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckItem> items;

  void add(std::string name, bool passed, std::string detail) {
    items.push_back({std::move(name), passed, std::move(detail)});
  }

  bool all_passed() const {
    return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.passed; });
  }
};

namespace detail {

// First-failure accumulator: items report either a cell count or where the
// sweep first went wrong.
struct Sweep {
  std::uint64_t cells = 0;
  bool ok = true;
  std::string where;

  void count() { ++cells; }

  void require(bool condition, const std::string& place) {
    count();
    if (!condition && ok) {
      ok = false;
      where = place;
    }
  }

  std::string detail(const char* unit) const {
    if (ok) return std::to_string(cells) + " " + unit + " checked";
    return "failed at " + where;
  }
};

inline std::string cell(int n, int k) {
  return "(n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")";
}

inline std::string cell3(int n, int k, int l) {
  return "(n=" + std::to_string(n) + ", k=" + std::to_string(k) + ", l=" + std::to_string(l) + ")";
}

inline bool fits_limit(int base, int exp, std::uint64_t limit) {
  std::uint64_t total = 1;
  for (int i = 0; i < exp; ++i) {
    if (total > limit / static_cast<std::uint64_t>(base)) return false;
    total *= static_cast<std::uint64_t>(base);
  }
  return total <= limit;
}

}  // namespace detail

// Strict dominance of the lonely count in the bus count, and strict growth
// of the lonely-passenger probability, over an exact grid.
inline SuiteResult check_theorem(int n_max = 12, int k_max = 8) {
  SuiteResult suite{"theorem", {}};
  const TheoremReport report = verify_theorem(n_max, k_max);

  detail::Sweep strict, monotone, dichotomy;
  for (const TheoremCell& c : report.cells) {
    strict.require(c.relation == Relation::strict,
                   detail::cell(c.n, c.k) + ": relation " + relation_name(c.relation));
    monotone.require(c.p_hi > c.p_lo, detail::cell(c.n, c.k) + ": p did not increase");
    dichotomy.require(distinct_unless_trivial(c.p_lo, c.p_hi, c.k, static_cast<std::uint64_t>(c.n)),
                      detail::cell(c.n, c.k) + ": probabilities coincide nontrivially");
  }
  suite.add("strict-dominance", strict.ok, strict.detail("cells"));
  suite.add("p-strictly-increasing", monotone.ok, monotone.detail("cells"));
  suite.add("p-distinct-dichotomy", dichotomy.ok, dichotomy.detail("cells"));

  // Order consistency: dominance across two bus-count steps must also show
  // up in the direct comparison.
  detail::Sweep transitive;
  const int n_spot = std::min(6, n_max);
  for (int k = 1; k + 2 <= k_max; ++k) {
    const auto big = lonely_marginal(exact_joint_dist(n_spot, k + 2));
    const auto small = lonely_marginal(exact_joint_dist(n_spot, k));
    transitive.require(cdf_dominates(big, small).relation == Relation::strict,
                       detail::cell(n_spot, k) + " vs k+2");
  }
  suite.add("two-step-transitivity", transitive.ok, transitive.detail("cells"));
  return suite;
}

// Big-integer inequalities behind the strictness argument.
inline SuiteResult check_stirling(int n_max = 200) {
  SuiteResult suite{"stirling", {}};

  detail::Sweep ratio;
  for (int n = 2; n <= n_max; ++n)
    for (int k = 1; k < n; ++k)
      ratio.require(check_stirling_ratio_inequality(n, k), detail::cell(n, k));
  suite.add("ratio-inequality", ratio.ok, ratio.detail("pairs"));

  detail::Sweep newton;
  for (int n = 3; n <= n_max; ++n) {
    const std::vector<BigInt> row = touchard_row(n);
    for (int k = 2; k < n; ++k)
      newton.require(check_newton_inequality(row, k), detail::cell(n, k));
  }
  suite.add("newton-touchard", newton.ok, newton.detail("indices"));

  // Two routes to the surjection count: factorial times the table entry
  // against direct inclusion-exclusion.
  detail::Sweep surj;
  for (int n = 0; n <= 50; ++n)
    for (int k = 0; k <= 50; ++k)
      surj.require(surjection_count(n, k) == lonely::detail::cover_count(n, k, k), detail::cell(n, k));
  suite.add("surjection-identity", surj.ok, surj.detail("cells"));
  return suite;
}

// Dynamic programming against brute-force enumeration, plus closed-form
// lonely-count cross-checks.
inline SuiteResult check_oracle(int n_cap = 20, int k_cap = 12, std::uint64_t limit = 1'000'000) {
  SuiteResult suite{"oracle", {}};

  detail::Sweep joint;
  std::vector<std::pair<int, int>> cells;
  for (int k = 1; k <= k_cap; ++k)
    for (int n = 0; n <= n_cap; ++n)
      if (detail::fits_limit(k, n, limit)) cells.emplace_back(n, k);
  // A couple of wide short grids beyond the cap, same budget.
  cells.emplace_back(3, 100);
  cells.emplace_back(2, 1000);
  for (const auto& [n, k] : cells) {
    if (!detail::fits_limit(k, n, limit)) continue;
    const auto enumerated = enumerate_joint(n, k, limit);
    const auto dp = joint_dist_slices(n, k);
    joint.require(enumerated == dp, detail::cell(n, k));
  }
  suite.add("dp-matches-enumeration", joint.ok, joint.detail("cells"));

  detail::Sweep counts;
  for (const auto& [n, k] : cells) {
    const auto lonely_dist = lonely_marginal(exact_joint_dist(n, k));
    const BigInt denom = pow_int(k, static_cast<std::uint64_t>(n));
    bool cell_ok = true;
    BigInt row_sum = 0;
    for (int j = 0; j <= std::min(n, k); ++j) {
      const BigInt c = lonely_count_configs(n, k, j);
      row_sum += c;
      if (lonely_dist.mass(j) != Rational(c, denom)) cell_ok = false;
    }
    counts.require(cell_ok && row_sum == denom, detail::cell(n, k));
  }
  suite.add("lonely-config-counts", counts.ok, counts.detail("cells"));

  detail::Sweep ne;
  for (int n = 1; n <= 10; ++n)
    for (int l = 1; l <= n; ++l) {
      if (!detail::fits_limit(l, n, limit)) continue;
      const NeEnumeration run = ne_enumerate(l, n, limit);
      bool cell_ok = run.total == surjection_count(n, l);
      for (int m = 0; m <= n && cell_ok; ++m)
        cell_ok = run.nonempty_slices[static_cast<std::size_t>(m)] == ne_nonempty_dist(l, n, m);
      ne.require(cell_ok, detail::cell3(n, l, l));
    }
  suite.add("ne-marginals-match", ne.ok, ne.detail("cells"));

  suite.add("spot-p-values", p_lonely(3, 2) == Rational(3, 4) && p_lonely(3, 3) == Rational(8, 9),
            "p(3,2) = 3/4, p(3,3) = 8/9");
  return suite;
}

// The conditioning story: permutation-symmetric functionals, the warning
// example, the reverse kernel, the h-transform against direct counting, and
// the decomposition of the lonely-count tail over the occupied count.
inline SuiteResult check_lemmas(int n_max = 10, int k_max = 6, std::uint64_t limit = 1'000'000) {
  SuiteResult suite{"lemmas", {}};

  const CautionaryProbs caution = cautionary_conditioning_probs();
  const bool caution_ok = caution.share_given_at_most_two_occupied == Rational(3, 7) &&
                          caution.share_given_buses_one_two == Rational(1, 2) &&
                          caution.share_given_at_most_two_occupied != caution.share_given_buses_one_two;
  suite.add("cautionary-remark", caution_ok,
            fraction_string(caution.share_given_at_most_two_occupied) + " vs " +
                fraction_string(caution.share_given_buses_one_two) + ", distinct");

  detail::Sweep catalog;
  for (int k = 1; k <= k_max; ++k)
    for (int n = 1; n <= n_max; ++n) {
      if (!detail::fits_limit(k, n, limit)) continue;
      for (int l = 1; l <= std::min(n, k); ++l)
        for (Functional f : kFunctionalCatalog) {
          const bool same = conditioned_law(n, k, l, f, limit) == ne_functional_law(l, n, f, limit);
          catalog.require(same, detail::cell3(n, k, l) + " " + functional_name(f));
        }
    }
  suite.add("conditioning-catalog", catalog.ok, catalog.detail("laws"));

  // Reverse jump probabilities computed from each conditioned chain's own
  // forward law must reproduce the l-free closed form.
  detail::Sweep reverse;
  for (int n = 2; n <= n_max; ++n)
    for (int l = 2; l <= n; ++l) {
      const ConditionedChain chain(l, n);
      std::vector<ExactDist<int>> dists;
      for (int m = 0; m <= n; ++m) dists.push_back(chain.nonempty_dist(m));
      for (int m = 1; m <= n; ++m)
        for (const auto& [i, p] : dists[static_cast<std::size_t>(m)].masses()) {
          if (i < 1) continue;
          const Rational prev = dists[static_cast<std::size_t>(m) - 1].mass(i - 1);
          const Rational joint = prev == 0 ? Rational(0) : prev * chain.birth_prob(m - 1, i - 1);
          reverse.require(joint / p == reverse_death_prob(m, i),
                          detail::cell3(n, l, l) + " m=" + std::to_string(m) +
                              " i=" + std::to_string(i));
        }
    }
  suite.add("reverse-kernel-identity", reverse.ok, reverse.detail("transitions"));

  detail::Sweep transform;
  for (int n = 1; n <= 12; ++n)
    for (int l = 1; l <= n; ++l) {
      const ConditionedChain chain(l, n);
      for (int m = 0; m <= n; ++m)
        transform.require(chain.nonempty_dist(m) == ne_nonempty_dist(l, n, m),
                          detail::cell3(n, l, l) + " m=" + std::to_string(m));
    }
  suite.add("h-transform-closed-form", transform.ok, transform.detail("slices"));

  // Averaging the survival product over the conditioned path law recovers
  // the closed-form probability that passenger 1 stays lonely.
  detail::Sweep survival;
  for (int n = 1; n <= n_max; ++n)
    for (int l = 1; l <= n; ++l) {
      const ExactDist<Path> law = ConditionedChain(l, n).path_law();
      Rational expectation = 0;
      for (const auto& [path, p] : law.masses()) expectation += p * lonely_survival_product(path);
      survival.require(expectation == lonely_first_prob_ne(n, l), detail::cell3(n, l, l));
    }
  suite.add("survival-expectation", survival.ok, survival.detail("cells"));

  detail::Sweep survival_monotone;
  {
    const ExactDist<Path> support = birth_path_law(8, 8);
    for (const auto& [hi, p_hi] : support.masses())
      for (const auto& [lo, p_lo] : support.masses()) {
        bool ge = true;
        for (std::size_t i = 0; i < hi.size(); ++i) ge = ge && hi[i] >= lo[i];
        if (!ge) continue;
        survival_monotone.require(lonely_survival_product(hi) >= lonely_survival_product(lo),
                                  "an ordered path pair at n=8");
      }
  }
  suite.add("survival-monotone", survival_monotone.ok, survival_monotone.detail("ordered pairs"));

  detail::Sweep monotone_first;
  for (int n = 2; n <= 200; ++n)
    for (int l = 2; l <= n; ++l)
      monotone_first.require(lonely_first_prob_ne(n, l) >= lonely_first_prob_ne(n, l - 1),
                             detail::cell(n, l));
  suite.add("lonely-first-monotone", monotone_first.ok, monotone_first.detail("cells"));

  // Tail decomposition over the occupied count: sum of conditioned tails
  // weighted by the occupied-count law equals the direct tail.
  detail::Sweep total_prob;
  for (int n = 1; n <= n_max; ++n)
    for (int k = 1; k <= k_max; ++k) {
      const auto joint = exact_joint_dist(n, k);
      const auto n_marginal = nonempty_marginal(joint);
      const auto l_marginal = lonely_marginal(joint);
      std::vector<ExactDist<int>> cond;  // conditioned lonely law per occupied count
      for (int l = 1; l <= std::min(n, k); ++l)
        cond.push_back(ConditionedChain(l, n).final_lonely_dist());
      bool cell_ok = true;
      for (long long u = 0; u <= n + 1; ++u) {
        Rational mix = 0;
        for (int l = 1; l <= std::min(n, k); ++l)
          mix += n_marginal.mass(l) * tail_ge(cond[static_cast<std::size_t>(l) - 1], u);
        if (mix != tail_ge(l_marginal, u)) cell_ok = false;
      }
      total_prob.require(cell_ok, detail::cell(n, k));
    }
  suite.add("total-probability", total_prob.ok, total_prob.detail("cells"));

  // Conditioned distributions also order in l, both for the final lonely
  // count and for every occupied-count slice.
  detail::Sweep ne_dominance;
  for (int n = 2; n <= n_max; ++n)
    for (int l = 2; l <= n; ++l) {
      bool cell_ok = weakly_dominates(ConditionedChain(l, n).final_lonely_dist(),
                                      ConditionedChain(l - 1, n).final_lonely_dist());
      for (int m = 0; m <= n && cell_ok; ++m)
        cell_ok = weakly_dominates(ne_nonempty_dist(l, n, m), ne_nonempty_dist(l - 1, n, m));
      ne_dominance.require(cell_ok, detail::cell3(n, l, l));
    }
  suite.add("conditioned-dominance", ne_dominance.ok, ne_dominance.detail("cells"));
  return suite;
}

// Sampled couplings: exhaustive pathwise checks over the full grid, plus
// goodness-of-fit of path-law marginals on representative cells.
inline SuiteResult check_couplings(int n_cap = 10, std::uint64_t paths = 100'000,
                                   std::uint64_t seed = kDefaultSeed) {
  SuiteResult suite{"couplings", {}};

  struct KindPlan {
    CouplingKind kind;
    std::vector<std::pair<int, int>> cells;      // (n, param)
    std::vector<std::pair<int, int>> gof_cells;  // subset with exact path laws
  };
  std::vector<KindPlan> plans;
  {
    KindPlan forward{CouplingKind::forward_nonempty, {}, {{4, 2}, {8, 3}}};
    for (int n = 2; n <= n_cap; n += 2)
      for (int k : {1, 2, 3, 6}) forward.cells.emplace_back(n, k);
    plans.push_back(std::move(forward));
    std::vector<std::pair<int, int>> grid;
    for (int n = 2; n <= n_cap; ++n)
      for (int l = 2; l <= n; ++l) grid.emplace_back(n, l);
    const std::vector<std::pair<int, int>> gof = {{3, 2}, {5, 3}, {6, 2}, {8, 4}};
    plans.push_back({CouplingKind::conditioned_nonempty, grid, gof});
    plans.push_back({CouplingKind::monotone, grid, gof});
    plans.push_back({CouplingKind::lonely, grid, gof});
  }

  std::uint64_t stream = 0;
  for (const KindPlan& plan : plans) {
    detail::Sweep violations;
    detail::Sweep fit;
    double min_p = 1.0;
    for (const auto& [n, param] : plan.cells) {
      const CouplingRunReport run = run_coupling(plan.kind, n, param, paths,
                                                 lonely::detail::derive_seed(seed, stream++));
      std::string where = detail::cell(n, param);
      if (run.dominance.first) where += " " + run.dominance.first->detail;
      else if (run.shape.first) where += " " + run.shape.first->detail;
      else if (run.validity.first) where += " " + run.validity.first->detail;
      violations.require(run.clean(), where);

      const bool wants_gof = std::find(plan.gof_cells.begin(), plan.gof_cells.end(),
                                       std::make_pair(n, param)) != plan.gof_cells.end();
      if (!wants_gof) continue;
      ExactDist<Path> hi_law, lo_law;
      switch (plan.kind) {
        case CouplingKind::forward_nonempty:
          hi_law = birth_path_law(n, param + 1);
          lo_law = birth_path_law(n, param);
          break;
        case CouplingKind::conditioned_nonempty:
        case CouplingKind::monotone:
          hi_law = ConditionedChain(param, n).path_law();
          lo_law = ConditionedChain(param - 1, n).path_law();
          break;
        case CouplingKind::lonely:
          hi_law = ConditionedChain(param, n).pair_path_law().map(
              [](const PathPair& pp) { return pp.lonely; });
          lo_law = ConditionedChain(param - 1, n).pair_path_law().map(
              [](const PathPair& pp) { return pp.lonely; });
          break;
      }
      const GofResult hi_fit = chi_square_gof(run.hi_tally, hi_law, paths);
      const GofResult lo_fit = chi_square_gof(run.lo_tally, lo_law, paths);
      min_p = std::min({min_p, hi_fit.p_value, lo_fit.p_value});
      fit.require(hi_fit.passed(kGofAlpha), detail::cell(n, param) + " hi marginal");
      fit.require(lo_fit.passed(kGofAlpha), detail::cell(n, param) + " lo marginal");
    }
    const std::string kind(coupling_kind_name(plan.kind));
    suite.add(kind + "-pathwise", violations.ok,
              violations.ok ? std::to_string(violations.cells) + " cells x " +
                                  std::to_string(paths) + " pairs clean"
                            : violations.detail("cells"));
    if (!plan.gof_cells.empty()) {
      std::ostringstream note;
      note << "min p-value " << min_p << " at alpha " << kGofAlpha;
      suite.add(kind + "-marginal-fit", fit.ok, fit.ok ? note.str() : fit.detail("fits"));
    }
  }

  // The checker itself must flag corrupted pairs.
  const CouplingRunReport swapped = run_coupling(CouplingKind::conditioned_nonempty, 6, 3,
                                                 std::min<std::uint64_t>(paths, 1000),
                                                 lonely::detail::derive_seed(seed, stream++), true);
  suite.add("negative-control", swapped.dominance.violations > 0,
            std::to_string(swapped.dominance.violations) + " violations flagged");
  return suite;
}

// Monte Carlo estimates against exact values, the deterministic n = 1 case,
// and the sampled shadow of the monotonicity statement.
inline SuiteResult check_mc(std::uint64_t samples = 100'000, std::uint64_t seed = kDefaultSeed) {
  SuiteResult suite{"mc", {}};

  const std::vector<std::pair<int, int>> grid = {{2, 2},  {3, 2},  {3, 3},  {5, 4},
                                                 {10, 7}, {12, 3}, {20, 10}, {20, 50}};
  detail::Sweep spot;
  double worst_z = 0;
  std::uint64_t stream = 0;
  for (const auto& [n, k] : grid) {
    const Estimate est = estimate_p(n, k, samples, lonely::detail::derive_seed(seed, stream++));
    const double z = est.z_score();
    worst_z = std::max(worst_z, std::abs(z));
    spot.require(std::abs(z) <= kSigmaBudget, detail::cell(n, k) + " z=" + std::to_string(z));
  }
  {
    std::ostringstream note;
    note << "worst |z| " << worst_z << " over " << grid.size() << " cells";
    suite.add("estimates-within-5-sigma", spot.ok, spot.ok ? note.str() : spot.detail("cells"));
  }

  const Estimate one = estimate_p(1, 4, 10, seed);
  suite.add("n1-exactly-one", one.value == 1.0 && one.std_err == 0.0,
            "estimate " + std::to_string(one.value));

  // Mean lonely count at (3,2) against the exact 3/4.
  {
    const int n = 3, k = 2;
    double sum = 0, sum_sq = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      const Configuration config =
          simulate_arrivals(n, k, lonely::detail::derive_seed(seed, 1000 + i));
      const double lone = lonely_count(config, k);
      sum += lone;
      sum_sq += lone * lone;
    }
    const double mean = sum / static_cast<double>(samples);
    const double var = (sum_sq / static_cast<double>(samples)) - mean * mean;
    const double se = std::sqrt(var / static_cast<double>(samples));
    const double exact = 0.75;
    const bool ok = se > 0 && std::abs(mean - exact) <= kSigmaBudget * se;
    std::ostringstream note;
    note << "mean " << mean << " vs exact " << exact << " (se " << se << ")";
    suite.add("mean-lonely-count", ok, note.str());
  }

  const ShadowReport shadow = monotonicity_shadow(20, 10, samples, lonely::detail::derive_seed(seed, 99));
  std::ostringstream note;
  note << "p-hat from " << shadow.cells.front().estimate.value << " to "
       << shadow.cells.back().estimate.value << " across k=1.." << shadow.cells.back().k;
  suite.add("shadow-monotone-5-sigma", shadow.nondecreasing_within_5sigma, note.str());
  return suite;
}

}  // namespace lonely::checks
