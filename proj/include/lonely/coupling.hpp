#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lonely/chain.hpp"
#include "lonely/rng.hpp"

namespace lonely {

enum class CouplingKind { forward_nonempty, conditioned_nonempty, monotone, lonely };

inline const char* coupling_kind_name(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::forward_nonempty: return "forward";
    case CouplingKind::conditioned_nonempty: return "conditioned";
    case CouplingKind::monotone: return "monotone";
    case CouplingKind::lonely: return "lonely";
  }
  throw std::invalid_argument("coupling_kind_name: bad enum value");
}

// One sampled pair of lock-step paths. For the nonempty-count couplings the
// components are occupied-bus paths; for the lonely coupling they are
// lonely-passenger-count paths. param_hi/param_lo identify the two marginal
// chains ((k+1, k) buses, or (l, l-1) conditioned targets).
struct CoupledPathPair {
  Path hi;
  Path lo;
  int n = 0;
  int param_hi = 0;
  int param_lo = 0;
  CouplingKind kind = CouplingKind::forward_nonempty;
};

namespace detail {

// Reverse-kernel thresholds bern(m, i) for the conditioned chain read
// backward, shared by every conditioned coupler. Index by [m][i] with
// 1 <= i <= min(m, l).
inline std::vector<std::vector<Bern>> reverse_bern_table(int n, int l) {
  std::vector<std::vector<Bern>> table(static_cast<std::size_t>(n) + 1);
  for (int m = 1; m <= n; ++m) {
    const int top = std::min(m, l);
    table[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(top) + 1);
    for (int i = 1; i <= top; ++i)
      table[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = make_bern(reverse_death_prob(m, i));
  }
  return table;
}

}  // namespace detail

// Shared-uniform coupling of the occupied-count chains with k+1 and k buses:
// one uniform word per arrival, each chain births iff the word clears its
// own threshold. At equal states the (k+1)-chain's birth probability is the
// larger, so the lower chain never overtakes.
class ForwardCoupler {
 public:
  ForwardCoupler(int n, int k) : n_(n), k_(k) {
    if (n < 0 || k < 1) throw std::invalid_argument("ForwardCoupler: need n >= 0, k >= 1");
    for (int i = 0; i <= k + 1; ++i) hi_bern_.push_back(detail::make_bern(forward_birth_prob(k + 1, i)));
    for (int i = 0; i <= k; ++i) lo_bern_.push_back(detail::make_bern(forward_birth_prob(k, i)));
  }

  CoupledPathPair sample(std::uint64_t seed) const {
    std::mt19937_64 rng(detail::derive_seed(seed, 0));
    CoupledPathPair out;
    out.n = n_;
    out.param_hi = k_ + 1;
    out.param_lo = k_;
    out.kind = CouplingKind::forward_nonempty;
    out.hi.assign(static_cast<std::size_t>(n_) + 1, 0);
    out.lo.assign(static_cast<std::size_t>(n_) + 1, 0);
    int hi = 0, lo = 0;
    for (int m = 1; m <= n_; ++m) {
      const std::uint64_t u = rng();
      hi += hi_bern_[static_cast<std::size_t>(hi)].fire(u) ? 1 : 0;
      lo += lo_bern_[static_cast<std::size_t>(lo)].fire(u) ? 1 : 0;
      out.hi[static_cast<std::size_t>(m)] = hi;
      out.lo[static_cast<std::size_t>(m)] = lo;
    }
    return out;
  }

 private:
  int n_;
  int k_;
  std::vector<detail::Bern> hi_bern_;
  std::vector<detail::Bern> lo_bern_;
};

// Coupling of the conditioned chains with targets l and l-1, built backward:
// two death chains started at l and l-1 run with independent randomness
// until they meet, then share state (and one stream) the rest of the way.
// Order is preserved because meeting is the only way to cross.
class ConditionedCoupler {
 public:
  ConditionedCoupler(int n, int l) : n_(n), l_(l) {
    if (l < 2 || l > n) throw std::invalid_argument("ConditionedCoupler: need 2 <= l <= n");
    bern_ = detail::reverse_bern_table(n, l);
  }

  CoupledPathPair sample(std::uint64_t seed) const {
    std::mt19937_64 shared(detail::derive_seed(seed, 0));
    std::mt19937_64 rng_hi(detail::derive_seed(seed, 1));
    std::mt19937_64 rng_lo(detail::derive_seed(seed, 2));
    CoupledPathPair out;
    out.n = n_;
    out.param_hi = l_;
    out.param_lo = l_ - 1;
    out.kind = CouplingKind::conditioned_nonempty;
    out.hi.assign(static_cast<std::size_t>(n_) + 1, 0);
    out.lo.assign(static_cast<std::size_t>(n_) + 1, 0);
    int hi = l_, lo = l_ - 1;
    out.hi[static_cast<std::size_t>(n_)] = hi;
    out.lo[static_cast<std::size_t>(n_)] = lo;
    for (int m = n_; m >= 1; --m) {
      if (hi == lo) {
        const std::uint64_t u = shared();
        hi -= fire(m, hi, u) ? 1 : 0;
        lo = hi;
      } else {
        hi -= fire(m, hi, rng_hi()) ? 1 : 0;
        lo -= fire(m, lo, rng_lo()) ? 1 : 0;
      }
      out.hi[static_cast<std::size_t>(m) - 1] = hi;
      out.lo[static_cast<std::size_t>(m) - 1] = lo;
    }
    return out;
  }

 private:
  bool fire(int m, int i, std::uint64_t u) const {
    return bern_[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)].fire(u);
  }

  int n_;
  int l_;
  std::vector<std::vector<detail::Bern>> bern_;
};

// Same two conditioned chains, driven backward by one shared uniform word
// per step. The jump threshold grows with the state, so the lower chain
// never jumps without the upper one; once they meet, equal states and equal
// words keep them glued. Forward in time the difference hi - lo is 0 until
// a single +1 step and 1 afterwards.
class MonotoneCoupler {
 public:
  MonotoneCoupler(int n, int l) : n_(n), l_(l) {
    if (l < 2 || l > n) throw std::invalid_argument("MonotoneCoupler: need 2 <= l <= n");
    bern_ = detail::reverse_bern_table(n, l);
  }

  CoupledPathPair sample(std::uint64_t seed) const {
    std::mt19937_64 rng(detail::derive_seed(seed, 0));
    CoupledPathPair out = sample_with(rng);
    return out;
  }

  // Exposed so the lonely coupler can drive the same construction from its
  // shared stream.
  CoupledPathPair sample_with(std::mt19937_64& rng) const {
    CoupledPathPair out;
    out.n = n_;
    out.param_hi = l_;
    out.param_lo = l_ - 1;
    out.kind = CouplingKind::monotone;
    out.hi.assign(static_cast<std::size_t>(n_) + 1, 0);
    out.lo.assign(static_cast<std::size_t>(n_) + 1, 0);
    int hi = l_, lo = l_ - 1;
    out.hi[static_cast<std::size_t>(n_)] = hi;
    out.lo[static_cast<std::size_t>(n_)] = lo;
    for (int m = n_; m >= 1; --m) {
      const std::uint64_t u = rng();
      hi -= fire(m, hi, u) ? 1 : 0;
      lo -= fire(m, lo, u) ? 1 : 0;
      out.hi[static_cast<std::size_t>(m) - 1] = hi;
      out.lo[static_cast<std::size_t>(m) - 1] = lo;
    }
    return out;
  }

 private:
  bool fire(int m, int i, std::uint64_t u) const {
    return bern_[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)].fire(u);
  }

  int n_;
  int l_;
  std::vector<std::vector<detail::Bern>> bern_;
};

// Coupling of the conditioned lonely-passenger counts: first a monotone pair
// of occupied-count paths, then lock-step seating. A birth makes its chain's
// count grow; a non-birth arrival removes a singleton with probability L/N.
// When neither chain births and the counts are equal, one shared word with
// thresholds L/N_hi <= L/N_lo ensures the upper never drops alone; in every
// other case the chains draw from their own streams.
class LonelyCoupler {
 public:
  LonelyCoupler(int n, int l) : n_(n), l_(l), monotone_(n, l) {
    seat_bern_.assign(static_cast<std::size_t>(l) + 1, {});
    for (int lone = 0; lone <= l; ++lone) {
      auto& row = seat_bern_[static_cast<std::size_t>(lone)];
      row.resize(static_cast<std::size_t>(l) + 1);
      for (int nb = std::max(lone, 1); nb <= l; ++nb)
        row[static_cast<std::size_t>(nb)] = detail::make_bern(Rational(lone, nb));
    }
  }

  CoupledPathPair sample(std::uint64_t seed) const {
    std::mt19937_64 shared(detail::derive_seed(seed, 0));
    std::mt19937_64 rng_hi(detail::derive_seed(seed, 1));
    std::mt19937_64 rng_lo(detail::derive_seed(seed, 2));
    const CoupledPathPair buses = monotone_.sample_with(shared);
    CoupledPathPair out;
    out.n = n_;
    out.param_hi = l_;
    out.param_lo = l_ - 1;
    out.kind = CouplingKind::lonely;
    out.hi.assign(static_cast<std::size_t>(n_) + 1, 0);
    out.lo.assign(static_cast<std::size_t>(n_) + 1, 0);
    int lone_hi = 0, lone_lo = 0;
    for (int m = 1; m <= n_; ++m) {
      const std::size_t pos = static_cast<std::size_t>(m);
      const bool birth_hi = buses.hi[pos] > buses.hi[pos - 1];
      const bool birth_lo = buses.lo[pos] > buses.lo[pos - 1];
      if (birth_hi && birth_lo) {
        ++lone_hi;
        ++lone_lo;
      } else if (birth_hi) {
        ++lone_hi;
        lone_lo -= seat(lone_lo, buses.lo[pos], rng_lo()) ? 1 : 0;
      } else if (lone_hi == lone_lo) {
        const std::uint64_t u = shared();
        const bool drop_hi = seat(lone_hi, buses.hi[pos], u);
        const bool drop_lo = seat(lone_lo, buses.lo[pos], u);
        lone_hi -= drop_hi ? 1 : 0;
        lone_lo -= drop_lo ? 1 : 0;
      } else {
        lone_hi -= seat(lone_hi, buses.hi[pos], rng_hi()) ? 1 : 0;
        lone_lo -= seat(lone_lo, buses.lo[pos], rng_lo()) ? 1 : 0;
      }
      out.hi[pos] = lone_hi;
      out.lo[pos] = lone_lo;
    }
    return out;
  }

 private:
  bool seat(int lone, int nb, std::uint64_t u) const {
    return seat_bern_[static_cast<std::size_t>(lone)][static_cast<std::size_t>(nb)].fire(u);
  }

  int n_;
  int l_;
  MonotoneCoupler monotone_;
  std::vector<std::vector<detail::Bern>> seat_bern_;
};

inline CoupledPathPair couple_forward_nonempty(int n, int k, std::uint64_t seed) {
  return ForwardCoupler(n, k).sample(seed);
}

inline CoupledPathPair couple_conditioned_nonempty(int n, int l, std::uint64_t seed) {
  return ConditionedCoupler(n, l).sample(seed);
}

inline CoupledPathPair couple_monotone(int n, int l, std::uint64_t seed) {
  return MonotoneCoupler(n, l).sample(seed);
}

inline CoupledPathPair couple_lonely(int n, int l, std::uint64_t seed) {
  return LonelyCoupler(n, l).sample(seed);
}

struct Violation {
  std::uint64_t pair_index = 0;
  int time = 0;
  int hi = 0;
  int lo = 0;
  std::string detail;
};

struct ViolationReport {
  std::string predicate;
  std::uint64_t pairs_checked = 0;
  std::uint64_t violations = 0;
  std::optional<Violation> first;  // the violation with the smallest pair index

  // Commutative, associative combine for sharded runs.
  void merge(const ViolationReport& other) {
    if (predicate.empty()) predicate = other.predicate;
    else if (!other.predicate.empty() && predicate != other.predicate)
      throw std::invalid_argument("ViolationReport::merge: predicate mismatch");
    pairs_checked += other.pairs_checked;
    violations += other.violations;
    if (other.first && (!first || other.first->pair_index < first->pair_index)) first = other.first;
  }
};

namespace detail {

inline std::optional<Violation> find_pathwise_ge(const CoupledPathPair& pair) {
  for (std::size_t m = 0; m < pair.hi.size(); ++m)
    if (pair.hi[m] < pair.lo[m])
      return Violation{0, static_cast<int>(m), pair.hi[m], pair.lo[m], "hi below lo"};
  return std::nullopt;
}

inline std::optional<Violation> find_monotone_difference(const CoupledPathPair& pair) {
  int total = 0;
  for (std::size_t m = 1; m < pair.hi.size(); ++m) {
    const int step = (pair.hi[m] - pair.lo[m]) - (pair.hi[m - 1] - pair.lo[m - 1]);
    if (step != 0 && step != 1)
      return Violation{0, static_cast<int>(m), pair.hi[m], pair.lo[m], "difference step not in {0,1}"};
    total += step;
  }
  if (total != 1) {
    const std::size_t last = pair.hi.size() - 1;
    return Violation{0, static_cast<int>(last), pair.hi[last], pair.lo[last],
                     "difference total " + std::to_string(total) + ", want 1"};
  }
  return std::nullopt;
}

inline std::optional<Violation> bad_component(const Path& path, int n, int limit, bool pure_birth,
                                              std::optional<int> endpoint, const char* which) {
  const std::string who(which);
  if (static_cast<int>(path.size()) != n + 1)
    return Violation{0, 0, 0, 0, who + " length " + std::to_string(path.size())};
  if (path[0] != 0) return Violation{0, 0, path[0], 0, who + " does not start at 0"};
  if (n >= 1 && path[1] != 1) return Violation{0, 1, path[1], 0, who + " first step must reach 1"};
  for (int m = 1; m <= n; ++m) {
    const std::size_t pos = static_cast<std::size_t>(m);
    const int step = path[pos] - path[pos - 1];
    const bool ok = pure_birth ? (step == 0 || step == 1) : (step >= -1 && step <= 1);
    if (!ok) return Violation{0, m, path[pos], 0, who + " has an invalid step"};
    if (path[pos] < 0 || path[pos] > limit || path[pos] > m)
      return Violation{0, m, path[pos], 0, who + " leaves the state space"};
  }
  if (endpoint && path[static_cast<std::size_t>(n)] != *endpoint)
    return Violation{0, n, path[static_cast<std::size_t>(n)], 0,
                     who + " endpoint " + std::to_string(path[static_cast<std::size_t>(n)]) +
                         ", want " + std::to_string(*endpoint)};
  return std::nullopt;
}

inline std::optional<Violation> find_invalid_marginal(const CoupledPathPair& pair) {
  switch (pair.kind) {
    case CouplingKind::forward_nonempty:
      if (auto v = bad_component(pair.hi, pair.n, pair.param_hi, true, std::nullopt, "hi")) return v;
      return bad_component(pair.lo, pair.n, pair.param_lo, true, std::nullopt, "lo");
    case CouplingKind::conditioned_nonempty:
    case CouplingKind::monotone:
      if (auto v = bad_component(pair.hi, pair.n, pair.param_hi, true, pair.param_hi, "hi")) return v;
      return bad_component(pair.lo, pair.n, pair.param_lo, true, pair.param_lo, "lo");
    case CouplingKind::lonely: {
      if (auto v = bad_component(pair.hi, pair.n, pair.param_hi, false, std::nullopt, "hi")) return v;
      if (auto v = bad_component(pair.lo, pair.n, pair.param_lo, false, std::nullopt, "lo")) return v;
      // Endpoint feasibility: a surjection onto `param` buses with L lonely
      // passengers needs L <= param and n >= 2*param - L.
      const std::size_t last = static_cast<std::size_t>(pair.n);
      if (pair.n < 2 * pair.param_hi - pair.hi[last])
        return Violation{0, pair.n, pair.hi[last], pair.lo[last], "hi endpoint infeasible"};
      if (pair.n < 2 * pair.param_lo - pair.lo[last])
        return Violation{0, pair.n, pair.hi[last], pair.lo[last], "lo endpoint infeasible"};
      return std::nullopt;
    }
  }
  throw std::invalid_argument("find_invalid_marginal: bad kind");
}

inline std::optional<Violation> find_violation(const CoupledPathPair& pair, std::string_view predicate) {
  if (predicate == "pathwise-ge") return find_pathwise_ge(pair);
  if (predicate == "monotone-difference") return find_monotone_difference(pair);
  if (predicate == "marginal-validity") return find_invalid_marginal(pair);
  throw std::invalid_argument("unknown pathwise predicate: " + std::string(predicate));
}

}  // namespace detail

inline ViolationReport verify_pathwise(const std::vector<CoupledPathPair>& pairs,
                                       std::string_view predicate) {
  ViolationReport report;
  report.predicate = std::string(predicate);
  for (const auto& pair : pairs) {
    auto v = detail::find_violation(pair, predicate);
    if (v) {
      v->pair_index = report.pairs_checked;
      ++report.violations;
      if (!report.first) report.first = std::move(v);
    }
    ++report.pairs_checked;
  }
  return report;
}

// Bulk sampling with on-the-fly checking and path tallies for downstream
// goodness-of-fit. Pair i uses seed base_seed + i, so disjoint index ranges
// can run in parallel and merge. negative_control swaps the components
// before checking; the checks must then report violations.
struct CouplingRunReport {
  CouplingKind kind = CouplingKind::forward_nonempty;
  int n = 0;
  int param_hi = 0;
  int param_lo = 0;
  std::uint64_t paths = 0;
  bool negative_control = false;
  ViolationReport dominance;
  ViolationReport shape;     // populated for the monotone coupling only
  ViolationReport validity;
  std::map<Path, std::uint64_t> hi_tally;
  std::map<Path, std::uint64_t> lo_tally;
  std::vector<CoupledPathPair> excerpts;

  bool clean() const {
    return dominance.violations == 0 && shape.violations == 0 && validity.violations == 0;
  }
};

inline CouplingRunReport run_coupling(CouplingKind kind, int n, int param, std::uint64_t paths,
                                      std::uint64_t base_seed, bool negative_control = false) {
  CouplingRunReport report;
  report.kind = kind;
  report.n = n;
  report.paths = paths;
  report.negative_control = negative_control;
  report.dominance.predicate = "pathwise-ge";
  report.shape.predicate = "monotone-difference";
  report.validity.predicate = "marginal-validity";

  auto sampler = [&]() -> std::function<CoupledPathPair(std::uint64_t)> {
    switch (kind) {
      case CouplingKind::forward_nonempty: {
        ForwardCoupler c(n, param);
        return [c = std::move(c)](std::uint64_t s) { return c.sample(s); };
      }
      case CouplingKind::conditioned_nonempty: {
        ConditionedCoupler c(n, param);
        return [c = std::move(c)](std::uint64_t s) { return c.sample(s); };
      }
      case CouplingKind::monotone: {
        MonotoneCoupler c(n, param);
        return [c = std::move(c)](std::uint64_t s) { return c.sample(s); };
      }
      case CouplingKind::lonely: {
        LonelyCoupler c(n, param);
        return [c = std::move(c)](std::uint64_t s) { return c.sample(s); };
      }
    }
    throw std::invalid_argument("run_coupling: bad kind");
  }();

  const bool check_shape = kind == CouplingKind::monotone;
  for (std::uint64_t i = 0; i < paths; ++i) {
    CoupledPathPair pair = sampler(base_seed + i);
    report.param_hi = pair.param_hi;
    report.param_lo = pair.param_lo;
    if (negative_control) {
      std::swap(pair.hi, pair.lo);
      std::swap(pair.param_hi, pair.param_lo);
    }
    auto record = [&](ViolationReport& target, const char* predicate) {
      auto v = detail::find_violation(pair, predicate);
      ++target.pairs_checked;
      if (v) {
        v->pair_index = i;
        ++target.violations;
        if (!target.first || v->pair_index < target.first->pair_index) target.first = std::move(v);
      }
    };
    record(report.dominance, "pathwise-ge");
    if (check_shape) record(report.shape, "monotone-difference");
    record(report.validity, "marginal-validity");
    ++report.hi_tally[pair.hi];
    ++report.lo_tally[pair.lo];
    if (report.excerpts.size() < 3) report.excerpts.push_back(pair);
  }
  return report;
}

}  // namespace lonely
