#pragma once

// Monte Carlo validation layer. This is the only module that touches
// floating point; every other module computes in exact arithmetic.

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lonely/chain.hpp"
#include "lonely/oracle.hpp"
#include "lonely/rng.hpp"

namespace lonely {

struct Estimate {
  double value = 0;
  double std_err = 0;
  std::uint64_t samples = 0;
  std::optional<Rational> exact_ref;

  // Distance to the exact value in standard-error units under the exact
  // null, sqrt(p(1-p)/samples). The plug-in std_err would degenerate to zero
  // whenever every sample lands on the same side, such as near-certain cells.
  double z_score() const {
    if (!exact_ref) throw std::logic_error("Estimate::z_score: no exact reference");
    const double exact = exact_ref->convert_to<double>();
    const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(samples));
    if (sigma == 0) return value == exact ? 0 : std::numeric_limits<double>::infinity();
    return (value - exact) / sigma;
  }
};

inline Configuration simulate_arrivals(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw std::invalid_argument("simulate_arrivals: need n >= 1, k >= 1");
  std::mt19937_64 rng(detail::derive_seed(seed, 0));
  Configuration config(static_cast<std::size_t>(n));
  for (auto& b : config) b = 1 + static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(k)));
  return config;
}

namespace detail {

// Samples run in fixed-size batches, one generator per batch, so that any
// partition of the batch range (serial or parallel) sums the same integer
// hit counts.
constexpr std::uint64_t kMcBatch = 4096;

template <class Count>
std::uint64_t count_hits(int n, int k, std::uint64_t samples, std::uint64_t seed, Count&& counts) {
  std::uint64_t hits = 0;
  std::vector<int> occ(static_cast<std::size_t>(k), 0);
  const std::uint64_t batches = (samples + kMcBatch - 1) / kMcBatch;
  std::uint64_t done = 0;
  for (std::uint64_t j = 0; j < batches; ++j) {
    std::mt19937_64 rng(derive_seed(seed, j + 1));
    const std::uint64_t in_batch = std::min(kMcBatch, samples - done);
    for (std::uint64_t s = 0; s < in_batch; ++s) {
      std::fill(occ.begin(), occ.end(), 0);
      int lone = 0;
      for (int p = 0; p < n; ++p) {
        const int o = ++occ[uniform_below(rng, static_cast<std::uint64_t>(k))];
        lone += (o == 1) - (o == 2);
      }
      hits += counts(lone) ? 1 : 0;
    }
    done += in_batch;
  }
  return hits;
}

}  // namespace detail

// Fraction of simulated configurations with at least one lonely passenger,
// with the exact probability attached where the exact computation is cheap.
inline Estimate estimate_p(int n, int k, std::uint64_t samples, std::uint64_t seed) {
  if (n < 1 || k < 1 || samples < 1)
    throw std::invalid_argument("estimate_p: need n >= 1, k >= 1, samples >= 1");
  const std::uint64_t hits =
      detail::count_hits(n, k, samples, seed, [](int lone) { return lone >= 1; });
  Estimate est;
  est.samples = samples;
  est.value = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_err = std::sqrt(est.value * (1 - est.value) / static_cast<double>(samples));
  if (n <= 50) est.exact_ref = p_lonely(n, k);
  return est;
}

// Monotonicity of p in the bus count, rechecked on simulated data: adjacent
// estimates may only decrease within combined noise. Reported, not a proof.
struct ShadowCell {
  int k = 0;
  Estimate estimate;
};

struct ShadowReport {
  int n = 0;
  std::uint64_t samples = 0;
  std::vector<ShadowCell> cells;
  bool nondecreasing_within_5sigma = true;
};

inline ShadowReport monotonicity_shadow(int n, int k_max, std::uint64_t samples, std::uint64_t seed) {
  if (k_max < 1) throw std::invalid_argument("monotonicity_shadow: need k_max >= 1");
  ShadowReport report;
  report.n = n;
  report.samples = samples;
  for (int k = 1; k <= k_max; ++k)
    report.cells.push_back({k, estimate_p(n, k, samples, detail::derive_seed(seed, static_cast<std::uint64_t>(k)))});
  for (std::size_t i = 1; i < report.cells.size(); ++i) {
    const Estimate& a = report.cells[i - 1].estimate;
    const Estimate& b = report.cells[i].estimate;
    const double sigma = std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err);
    if (b.value - a.value < -5 * sigma) report.nondecreasing_within_5sigma = false;
  }
  return report;
}

struct GofResult {
  double statistic = 0;
  unsigned degrees = 0;
  double p_value = 1;
  std::size_t bins = 0;             // cells entering the statistic, after pooling
  bool impossible_outcome = false;  // saw an outcome the exact law rules out

  bool passed(double alpha) const { return !impossible_outcome && p_value >= alpha; }
};

// Pearson chi-square test of observed outcome counts against an exact law.
// Cells with expected count below 5 are pooled in outcome order; a trailing
// under-filled pool merges into the previous cell.
template <class Outcome>
GofResult chi_square_gof(const std::map<Outcome, std::uint64_t>& observed,
                         const ExactDist<Outcome>& law, std::uint64_t total) {
  law.require_normalized("chi_square_gof");
  std::uint64_t seen = 0;
  for (const auto& [value, count] : observed) {
    seen += count;
    if (count > 0 && law.mass(value) == 0) {
      GofResult out;
      out.impossible_outcome = true;
      out.p_value = 0;
      return out;
    }
  }
  if (seen != total) throw std::invalid_argument("chi_square_gof: counts do not sum to total");

  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double pool_o = 0, pool_e = 0;
  for (const auto& [value, p] : law.masses()) {
    const double e = p.template convert_to<double>() * static_cast<double>(total);
    const auto it = observed.find(value);
    const double o = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    pool_o += o;
    pool_e += e;
    if (pool_e >= 5) {
      cells.emplace_back(pool_o, pool_e);
      pool_o = pool_e = 0;
    }
  }
  if (pool_e > 0) {
    if (cells.empty()) cells.emplace_back(pool_o, pool_e);
    else {
      cells.back().first += pool_o;
      cells.back().second += pool_e;
    }
  }

  GofResult out;
  out.bins = cells.size();
  if (cells.size() < 2) return out;  // nothing to test against
  for (const auto& [o, e] : cells) out.statistic += (o - e) * (o - e) / e;
  out.degrees = static_cast<unsigned>(cells.size() - 1);
  const boost::math::chi_squared_distribution<double> dist(out.degrees);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace lonely
