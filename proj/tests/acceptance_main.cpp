// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances and budgets are pinned here and in lonely/checks.hpp: exact
// comparisons everywhere, goodness-of-fit alpha 1e-3, Monte Carlo budget
// five standard errors.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "lonely/checks.hpp"
#include "lonely/oracle.hpp"

namespace {

using lonely::checks::CheckItem;
using lonely::checks::SuiteResult;

struct Criterion {
  int id = 0;
  bool passed = false;
  double seconds = 0;
  std::string description;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const CheckItem* find_item(const SuiteResult& suite, const std::string& name) {
  for (const auto& item : suite.items)
    if (item.name == name) return &item;
  return nullptr;
}

// Criterion passes only if every named item exists and passed.
Criterion from_items(int id, std::string description, const SuiteResult& suite,
                     std::initializer_list<const char*> names, double seconds,
                     double budget = 0) {
  Criterion c;
  c.id = id;
  c.description = std::move(description);
  c.seconds = seconds;
  c.passed = true;
  for (const char* name : names) {
    const CheckItem* item = find_item(suite, name);
    if (item == nullptr) {
      c.passed = false;
      c.detail = std::string("missing check ") + name;
      return c;
    }
    if (!item->passed) {
      c.passed = false;
      c.detail = std::string(name) + ": " + item->detail;
      return c;
    }
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += std::string(name) + ": " + item->detail;
  }
  if (budget > 0 && seconds >= budget) {
    c.passed = false;
    c.detail += "; over time budget of " + std::to_string(budget) + " s";
  }
  return c;
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  const auto wall_start = std::chrono::steady_clock::now();

  {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = lonely::checks::check_theorem(12, 8);
    results.push_back(from_items(
        1, "strict dominance and strictly increasing lonely probability, n <= 12, k < 8", suite,
        {"strict-dominance", "p-strictly-increasing", "p-distinct-dichotomy"},
        seconds_since(start), 10.0));
  }

  {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = lonely::checks::check_oracle(20, 12, 1'000'000);
    results.push_back(from_items(
        2, "recursion equals brute-force enumeration on every in-budget cell, spot p-values pinned",
        suite, {"dp-matches-enumeration", "lonely-config-counts", "spot-p-values"},
        seconds_since(start), 60.0));
  }

  {
    const auto start = std::chrono::steady_clock::now();
    const auto probs = lonely::cautionary_conditioning_probs();
    const double took = seconds_since(start);
    Criterion c;
    c.id = 3;
    c.description = "the two conditioning readings at n = k = 3 give 3/7 and 1/2 and differ";
    c.seconds = took;
    c.passed = probs.share_given_at_most_two_occupied == lonely::Rational(3, 7) &&
               probs.share_given_buses_one_two == lonely::Rational(1, 2) &&
               probs.share_given_at_most_two_occupied != probs.share_given_buses_one_two &&
               took < 1.0;
    c.detail = lonely::fraction_string(probs.share_given_at_most_two_occupied) + " vs " +
               lonely::fraction_string(probs.share_given_buses_one_two);
    results.push_back(c);
  }

  const auto lemmas_start = std::chrono::steady_clock::now();
  const auto lemmas = lonely::checks::check_lemmas(10, 6, 1'000'000);
  const double lemmas_seconds = seconds_since(lemmas_start);

  results.push_back(from_items(
      4, "conditioned laws match enumeration for every catalog functional on in-budget cells",
      lemmas, {"conditioning-catalog"}, lemmas_seconds));

  {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = lonely::checks::check_stirling(200);
    results.push_back(from_items(
        5, "ratio inequality for 1 <= k < n <= 200 and log-concavity of every coefficient row",
        suite, {"ratio-inequality", "newton-touchard"}, seconds_since(start), 30.0));
  }

  results.push_back(from_items(
      6, "reverse transition probabilities reduce to the partition-count ratio, 2 <= l <= n <= 10",
      lemmas, {"reverse-kernel-identity"}, lemmas_seconds));

  {
    const auto start = std::chrono::steady_clock::now();
    const auto suite =
        lonely::checks::check_couplings(10, 100'000, lonely::checks::kDefaultSeed);
    results.push_back(from_items(
        7, "coupled samples: zero pathwise violations, marginals fit exact laws at alpha 1e-3",
        suite,
        {"forward-pathwise", "conditioned-pathwise", "monotone-pathwise", "lonely-pathwise",
         "forward-marginal-fit", "conditioned-marginal-fit", "monotone-marginal-fit",
         "lonely-marginal-fit", "negative-control"},
        seconds_since(start)));
  }

  results.push_back(from_items(
      8, "mixing conditioned tails over the occupied-count law recovers the direct tail, n <= 10",
      lemmas, {"total-probability"}, lemmas_seconds));

  {
    const auto start = std::chrono::steady_clock::now();
    const auto suite = lonely::checks::check_mc(100'000, lonely::checks::kDefaultSeed);
    results.push_back(from_items(
        9, "sampled estimates within five standard errors; a single passenger is always lonely",
        suite, {"estimates-within-5-sigma", "n1-exactly-one"}, seconds_since(start)));
  }

  bool all_passed = true;
  for (const auto& c : results) {
    all_passed = all_passed && c.passed;
    std::printf("criterion %d %s (%.2fs): %s%s%s\n", c.id, c.passed ? "PASS" : "FAIL", c.seconds,
                c.description.c_str(), c.detail.empty() ? "" : " -- ", c.detail.c_str());
  }
  std::printf("acceptance %s (%.2fs total)\n", all_passed ? "PASS" : "FAIL",
              seconds_since(wall_start));
  return all_passed ? 0 : 1;
}
